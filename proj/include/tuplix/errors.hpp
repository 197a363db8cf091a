#pragma once

#include <stdexcept>
#include <string>

namespace tuplix {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnboundVariableError : Error {
    std::string name;
    explicit UnboundVariableError(std::string var)
        : Error("unbound data variable: " + var), name(std::move(var)) {}
};

// A term node falls outside the fragment an operation accepts.
struct FragmentError : Error {
    std::string fragment;
    std::string node;
    FragmentError(std::string frag, std::string node_kind)
        : Error("term is not in the " + frag + " fragment (offending node: " + node_kind + ")"),
          fragment(std::move(frag)),
          node(std::move(node_kind)) {}
};

struct ScalarOverTuplixVariableError : Error {
    ScalarOverTuplixVariableError()
        : Error("cannot push a scalar into a tuplix variable") {}
};

struct ClearOverTuplixVariableError : Error {
    ClearOverTuplixVariableError()
        : Error("cannot clear attributes of a tuplix variable") {}
};

struct EncapOverTuplixVariableError : Error {
    EncapOverTuplixVariableError()
        : Error("cannot encapsulate a tuplix variable") {}
};

struct UnsupportedSummationError : Error {
    UnsupportedSummationError()
        : Error("summation binder could not be eliminated before evaluation") {}
};

struct FreeTuplixVariableError : Error {
    std::string name;
    explicit FreeTuplixVariableError(std::string var)
        : Error("free tuplix variable in evaluation: $" + var), name(std::move(var)) {}
};

struct ParseError : Error {
    int line;
    int column;
    ParseError(std::string msg, int l, int c)
        : Error("parse error at " + std::to_string(l) + ":" + std::to_string(c) + ": " + msg),
          line(l),
          column(c) {}
};

struct UnknownReferenceError : Error {
    std::string name;
    explicit UnknownReferenceError(std::string ref)
        : Error("unknown definition reference: @" + ref), name(std::move(ref)) {}
};

struct CyclicReferenceError : Error {
    std::string name;
    explicit CyclicReferenceError(std::string ref)
        : Error("cyclic definition reference through @" + ref), name(std::move(ref)) {}
};

}  // namespace tuplix
