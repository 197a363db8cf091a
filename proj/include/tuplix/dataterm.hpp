#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>

#include "tuplix/errors.hpp"
#include "tuplix/quantity.hpp"

namespace tuplix {

enum class DtKind { Constant, Variable, Add, Mul, Neg, Inv, Abs };

class DataTerm;
using DataTermPtr = std::shared_ptr<const DataTerm>;

/// Symbolic expression of the quantity sort. Immutable tree; there is no
/// variable binding inside data terms, so substitution is plain replacement.
class DataTerm {
public:
    DtKind kind;
    Quantity value;       // Constant
    std::string name;     // Variable
    DataTermPtr lhs;      // Add/Mul left, or the unary operand
    DataTermPtr rhs;      // Add/Mul right

    DataTerm(DtKind k, Quantity v, std::string n, DataTermPtr l, DataTermPtr r)
        : kind(k), value(std::move(v)), name(std::move(n)), lhs(std::move(l)), rhs(std::move(r)) {}
};

namespace dt {

inline DataTermPtr constant(Quantity q) {
    return std::make_shared<DataTerm>(DtKind::Constant, std::move(q), "", nullptr, nullptr);
}
inline DataTermPtr variable(std::string name) {
    return std::make_shared<DataTerm>(DtKind::Variable, Quantity(), std::move(name), nullptr, nullptr);
}
inline DataTermPtr add(DataTermPtr a, DataTermPtr b) {
    return std::make_shared<DataTerm>(DtKind::Add, Quantity(), "", std::move(a), std::move(b));
}
inline DataTermPtr mul(DataTermPtr a, DataTermPtr b) {
    return std::make_shared<DataTerm>(DtKind::Mul, Quantity(), "", std::move(a), std::move(b));
}
// Negation of a constant folds so that printed terms re-parse to the same tree.
inline DataTermPtr neg(DataTermPtr a) {
    if (a->kind == DtKind::Constant) return constant(-a->value);
    return std::make_shared<DataTerm>(DtKind::Neg, Quantity(), "", std::move(a), nullptr);
}
inline DataTermPtr inv(DataTermPtr a) {
    return std::make_shared<DataTerm>(DtKind::Inv, Quantity(), "", std::move(a), nullptr);
}
inline DataTermPtr abs(DataTermPtr a) {
    return std::make_shared<DataTerm>(DtKind::Abs, Quantity(), "", std::move(a), nullptr);
}
inline DataTermPtr sub(DataTermPtr a, DataTermPtr b) { return add(std::move(a), neg(std::move(b))); }
inline DataTermPtr div(DataTermPtr a, DataTermPtr b) { return mul(std::move(a), inv(std::move(b))); }

inline DataTermPtr zero() { return constant(Quantity(0)); }
inline DataTermPtr one() { return constant(Quantity(1)); }

/// x^k by repeated multiplication; negative exponents go through inv(x).
inline DataTermPtr pow(DataTermPtr base, int exponent) {
    if (exponent < 0) return pow(inv(std::move(base)), -exponent);
    if (exponent == 0) return one();
    DataTermPtr acc = base;
    for (int i = 1; i < exponent; ++i) acc = mul(acc, base);
    return acc;
}

}  // namespace dt

using Environment = std::map<std::string, Quantity>;

/// Exact evaluation in the quantity domain; the inverse branch is total.
inline Quantity evaluate(const DataTermPtr& t, const Environment& env) {
    switch (t->kind) {
        case DtKind::Constant: return t->value;
        case DtKind::Variable: {
            auto it = env.find(t->name);
            if (it == env.end()) throw UnboundVariableError(t->name);
            return it->second;
        }
        case DtKind::Add: return evaluate(t->lhs, env) + evaluate(t->rhs, env);
        case DtKind::Mul: return evaluate(t->lhs, env) * evaluate(t->rhs, env);
        case DtKind::Neg: return -evaluate(t->lhs, env);
        case DtKind::Inv: return evaluate(t->lhs, env).inverse();
        case DtKind::Abs: return evaluate(t->lhs, env).abs();
    }
    throw Error("corrupt data term");
}

/// Replaces every occurrence of `var` by `replacement`.
inline DataTermPtr substitute(const DataTermPtr& t, const std::string& var, const DataTermPtr& replacement) {
    switch (t->kind) {
        case DtKind::Constant: return t;
        case DtKind::Variable: return t->name == var ? replacement : t;
        case DtKind::Add: return dt::add(substitute(t->lhs, var, replacement), substitute(t->rhs, var, replacement));
        case DtKind::Mul: return dt::mul(substitute(t->lhs, var, replacement), substitute(t->rhs, var, replacement));
        case DtKind::Neg: return dt::neg(substitute(t->lhs, var, replacement));
        case DtKind::Inv: return dt::inv(substitute(t->lhs, var, replacement));
        case DtKind::Abs: return dt::abs(substitute(t->lhs, var, replacement));
    }
    throw Error("corrupt data term");
}

inline void collect_variables(const DataTermPtr& t, std::set<std::string>& out) {
    switch (t->kind) {
        case DtKind::Constant: return;
        case DtKind::Variable: out.insert(t->name); return;
        case DtKind::Add:
        case DtKind::Mul:
            collect_variables(t->lhs, out);
            collect_variables(t->rhs, out);
            return;
        case DtKind::Neg:
        case DtKind::Inv:
        case DtKind::Abs:
            collect_variables(t->lhs, out);
            return;
    }
}

inline std::set<std::string> variables(const DataTermPtr& t) {
    std::set<std::string> out;
    collect_variables(t, out);
    return out;
}

inline bool structurally_equal(const DataTermPtr& a, const DataTermPtr& b) {
    if (a.get() == b.get()) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case DtKind::Constant: return a->value == b->value;
        case DtKind::Variable: return a->name == b->name;
        case DtKind::Add:
        case DtKind::Mul:
            return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
        case DtKind::Neg:
        case DtKind::Inv:
        case DtKind::Abs:
            return structurally_equal(a->lhs, b->lhs);
    }
    return false;
}

namespace detail {

// Precedence levels for printing: 0 additive, 1 multiplicative, 2 unary, 3 atomic.
inline void print_data(const DataTermPtr& t, int level, std::string& out) {
    auto paren = [&](int needed, auto&& body) {
        bool p = level > needed;
        if (p) out += "(";
        body();
        if (p) out += ")";
    };
    switch (t->kind) {
        case DtKind::Constant:
            if (t->value.is_negative() && level > 1) {
                out += "(";
                out += t->value.str();
                out += ")";
            } else {
                out += t->value.str();
            }
            return;
        case DtKind::Variable: out += t->name; return;
        case DtKind::Add:
            paren(0, [&] {
                print_data(t->lhs, 0, out);
                // a + (-b) prints as a - b
                if (t->rhs->kind == DtKind::Neg) {
                    out += " - ";
                    print_data(t->rhs->lhs, 1, out);
                } else if (t->rhs->kind == DtKind::Constant && t->rhs->value.is_negative()) {
                    out += " - ";
                    out += (-t->rhs->value).str();
                } else {
                    out += " + ";
                    print_data(t->rhs, 1, out);
                }
            });
            return;
        case DtKind::Mul:
            paren(1, [&] {
                print_data(t->lhs, 1, out);
                if (t->rhs->kind == DtKind::Inv) {
                    out += " / ";
                    print_data(t->rhs->lhs, 2, out);
                } else {
                    out += " * ";
                    print_data(t->rhs, 2, out);
                }
            });
            return;
        case DtKind::Neg:
            paren(2, [&] {
                out += "-";
                print_data(t->lhs, 2, out);
            });
            return;
        case DtKind::Inv:
            out += "inv(";
            print_data(t->lhs, 0, out);
            out += ")";
            return;
        case DtKind::Abs:
            out += "abs(";
            print_data(t->lhs, 0, out);
            out += ")";
            return;
    }
}

}  // namespace detail

/// DSL-syntax rendering; reparsing yields a structurally identical term.
inline std::string to_string(const DataTermPtr& t) {
    std::string out;
    detail::print_data(t, 0, out);
    return out;
}

}  // namespace tuplix
