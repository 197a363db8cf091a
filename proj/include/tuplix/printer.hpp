#pragma once

#include <string>

#include "tuplix/term.hpp"

namespace tuplix {

namespace detail {

// Levels: 0 choice, 1 conjunction, 2 prefix operators, 3 atoms.
inline void print_term(const TermPtr& t, int level, std::string& out) {
    auto paren = [&](int mine, auto&& body) {
        bool p = level > mine;
        if (p) out += "(";
        body();
        if (p) out += ")";
    };
    auto attr_block = [&](const char* kw, const AttrSet& attrs) {
        out += kw;
        out += "{";
        bool first = true;
        for (const auto& a : attrs) {
            if (!first) out += ", ";
            out += a;
            first = false;
        }
        out += "} ";
    };
    switch (t->kind) {
        case TKind::Empty: out += "eps"; return;
        case TKind::Null: out += "delta"; return;
        case TKind::Var:
            out += "$";
            out += t->name;
            return;
        case TKind::Ref:
            out += "@";
            out += t->name;
            return;
        case TKind::Entry:
            out += t->attribute;
            out += "(";
            out += to_string(t->data);
            out += ")";
            return;
        case TKind::Test:
            out += "test(";
            out += to_string(t->data);
            out += ")";
            return;
        case TKind::Choice:
            paren(0, [&] {
                print_term(t->left, 0, out);
                out += " + ";
                print_term(t->right, 1, out);
            });
            return;
        case TKind::Conj:
            paren(1, [&] {
                print_term(t->left, 1, out);
                out += " & ";
                print_term(t->right, 2, out);
            });
            return;
        case TKind::Sum:
            paren(2, [&] {
                out += "sum ";
                out += t->name;
                out += " . ";
                print_term(t->left, 2, out);
            });
            return;
        case TKind::Scalar:
            paren(2, [&] {
                print_data(t->data, 1, out);
                out += " * ";
                // a nested scalar body needs parentheses: the coefficient
                // grammar would otherwise swallow the next factor
                print_term(t->left, t->left->kind == TKind::Scalar ? 3 : 2, out);
            });
            return;
        case TKind::Clear:
            paren(2, [&] {
                attr_block("clear", t->attributes);
                print_term(t->left, 2, out);
            });
            return;
        case TKind::Encap:
            paren(2, [&] {
                attr_block("encap", t->attributes);
                print_term(t->left, 2, out);
            });
            return;
        case TKind::Select:
            paren(2, [&] {
                attr_block("select", t->attributes);
                print_term(t->left, 2, out);
            });
            return;
    }
}

}  // namespace detail

/// DSL-syntax rendering; reparsing yields a structurally identical term.
inline std::string to_string(const TermPtr& t) {
    std::string out;
    detail::print_term(t, 0, out);
    return out;
}

}  // namespace tuplix
