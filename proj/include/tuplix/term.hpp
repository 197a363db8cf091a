#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "tuplix/dataterm.hpp"

namespace tuplix {

using Attribute = std::string;
using AttrSet = std::set<Attribute>;

// Term constructors of the tuplix sort. Ref and Select exist only between
// parsing and definition resolution; the engine proper never sees them.
enum class TKind {
    Empty,    // eps: the unit of conjunctive composition
    Null,     // delta: nullifies conjunctions, the unit of choice
    Entry,    // a(p): attribute-quantity pair
    Test,     // test(p): eps when p = 0, delta otherwise
    Conj,     // s & t
    Choice,   // s + t
    Sum,      // sum u . t — one alternative per quantity substituted for u
    Scalar,   // p * t — multiplies entry values
    Clear,    // clear{I} t — unconditionally removes entries with attribute in I
    Encap,    // encap{H} t — per alternative, H-entries must total zero, then vanish
    Var,      // $x: tuplix variable
    Ref,      // @name: definition reference (parser stage)
    Select,   // select{B} t: clears everything outside B (parser stage)
};

inline const char* kind_name(TKind k) {
    switch (k) {
        case TKind::Empty: return "eps";
        case TKind::Null: return "delta";
        case TKind::Entry: return "entry";
        case TKind::Test: return "test";
        case TKind::Conj: return "conjunction";
        case TKind::Choice: return "choice";
        case TKind::Sum: return "summation";
        case TKind::Scalar: return "scalar";
        case TKind::Clear: return "clear";
        case TKind::Encap: return "encapsulation";
        case TKind::Var: return "tuplix variable";
        case TKind::Ref: return "reference";
        case TKind::Select: return "select";
    }
    return "?";
}

class TuplixTerm;
using TermPtr = std::shared_ptr<const TuplixTerm>;

class TuplixTerm {
public:
    TKind kind;
    Attribute attribute;   // Entry
    DataTermPtr data;      // Entry value, Test argument, Scalar coefficient
    std::string name;      // Sum binder, Var / Ref name
    AttrSet attributes;    // Clear / Encap / Select
    TermPtr left;          // binary left or unary body
    TermPtr right;         // binary right

    TuplixTerm(TKind k, Attribute a, DataTermPtr d, std::string n, AttrSet as, TermPtr l, TermPtr r)
        : kind(k),
          attribute(std::move(a)),
          data(std::move(d)),
          name(std::move(n)),
          attributes(std::move(as)),
          left(std::move(l)),
          right(std::move(r)) {}
};

namespace tt {

inline TermPtr make(TKind k, Attribute a, DataTermPtr d, std::string n, AttrSet as, TermPtr l, TermPtr r) {
    return std::make_shared<TuplixTerm>(k, std::move(a), std::move(d), std::move(n), std::move(as),
                                        std::move(l), std::move(r));
}

inline TermPtr empty() { return make(TKind::Empty, "", nullptr, "", {}, nullptr, nullptr); }
inline TermPtr null() { return make(TKind::Null, "", nullptr, "", {}, nullptr, nullptr); }
inline TermPtr entry(Attribute a, DataTermPtr p) {
    return make(TKind::Entry, std::move(a), std::move(p), "", {}, nullptr, nullptr);
}
inline TermPtr test(DataTermPtr p) { return make(TKind::Test, "", std::move(p), "", {}, nullptr, nullptr); }
inline TermPtr conj(TermPtr l, TermPtr r) {
    return make(TKind::Conj, "", nullptr, "", {}, std::move(l), std::move(r));
}
inline TermPtr choice(TermPtr l, TermPtr r) {
    return make(TKind::Choice, "", nullptr, "", {}, std::move(l), std::move(r));
}
inline TermPtr sum(std::string binder, TermPtr body) {
    return make(TKind::Sum, "", nullptr, std::move(binder), {}, std::move(body), nullptr);
}
inline TermPtr scalar(DataTermPtr p, TermPtr body) {
    return make(TKind::Scalar, "", std::move(p), "", {}, std::move(body), nullptr);
}
inline TermPtr clear(AttrSet attrs, TermPtr body) {
    return make(TKind::Clear, "", nullptr, "", std::move(attrs), std::move(body), nullptr);
}
inline TermPtr encap(AttrSet attrs, TermPtr body) {
    return make(TKind::Encap, "", nullptr, "", std::move(attrs), std::move(body), nullptr);
}
inline TermPtr tvar(std::string name) { return make(TKind::Var, "", nullptr, std::move(name), {}, nullptr, nullptr); }
inline TermPtr ref(std::string name) { return make(TKind::Ref, "", nullptr, std::move(name), {}, nullptr, nullptr); }
inline TermPtr select(AttrSet attrs, TermPtr body) {
    return make(TKind::Select, "", nullptr, "", std::move(attrs), std::move(body), nullptr);
}

/// Conjunction of a list; eps for the empty list.
inline TermPtr conj_all(const std::vector<TermPtr>& parts) {
    if (parts.empty()) return empty();
    TermPtr acc = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) acc = conj(acc, parts[i]);
    return acc;
}

/// Choice over a list; delta for the empty list.
inline TermPtr choice_all(const std::vector<TermPtr>& parts) {
    if (parts.empty()) return null();
    TermPtr acc = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) acc = choice(acc, parts[i]);
    return acc;
}

}  // namespace tt

namespace detail {

inline void collect_free_data_vars(const TermPtr& t, std::set<std::string>& bound,
                                   std::set<std::string>& out) {
    switch (t->kind) {
        case TKind::Empty:
        case TKind::Null:
        case TKind::Var:
            return;
        case TKind::Ref:
            throw Error("unresolved reference in engine term: @" + t->name);
        case TKind::Entry:
        case TKind::Test: {
            for (const auto& v : variables(t->data))
                if (!bound.count(v)) out.insert(v);
            return;
        }
        case TKind::Scalar: {
            for (const auto& v : variables(t->data))
                if (!bound.count(v)) out.insert(v);
            collect_free_data_vars(t->left, bound, out);
            return;
        }
        case TKind::Conj:
        case TKind::Choice:
            collect_free_data_vars(t->left, bound, out);
            collect_free_data_vars(t->right, bound, out);
            return;
        case TKind::Sum: {
            bool fresh = bound.insert(t->name).second;
            collect_free_data_vars(t->left, bound, out);
            if (fresh) bound.erase(t->name);
            return;
        }
        case TKind::Clear:
        case TKind::Encap:
        case TKind::Select:
            collect_free_data_vars(t->left, bound, out);
            return;
    }
}

}  // namespace detail

inline std::set<std::string> free_data_variables(const TermPtr& t) {
    std::set<std::string> bound, out;
    detail::collect_free_data_vars(t, bound, out);
    return out;
}

/// Every data variable occurring anywhere, bound or free. Used to pick fresh names.
inline void collect_all_data_vars(const TermPtr& t, std::set<std::string>& out) {
    switch (t->kind) {
        case TKind::Empty:
        case TKind::Null:
        case TKind::Var:
        case TKind::Ref:
            return;
        case TKind::Entry:
        case TKind::Test:
            collect_variables(t->data, out);
            return;
        case TKind::Scalar:
            collect_variables(t->data, out);
            collect_all_data_vars(t->left, out);
            return;
        case TKind::Conj:
        case TKind::Choice:
            collect_all_data_vars(t->left, out);
            collect_all_data_vars(t->right, out);
            return;
        case TKind::Sum:
            out.insert(t->name);
            collect_all_data_vars(t->left, out);
            return;
        case TKind::Clear:
        case TKind::Encap:
        case TKind::Select:
            collect_all_data_vars(t->left, out);
            return;
    }
}

inline std::set<std::string> all_data_variables(const TermPtr& t) {
    std::set<std::string> out;
    collect_all_data_vars(t, out);
    return out;
}

inline void collect_tuplix_variables(const TermPtr& t, std::vector<std::string>& out) {
    switch (t->kind) {
        case TKind::Var: out.push_back(t->name); return;
        case TKind::Conj:
        case TKind::Choice:
            collect_tuplix_variables(t->left, out);
            collect_tuplix_variables(t->right, out);
            return;
        case TKind::Sum:
        case TKind::Scalar:
        case TKind::Clear:
        case TKind::Encap:
        case TKind::Select:
            collect_tuplix_variables(t->left, out);
            return;
        default: return;
    }
}

inline bool tuplix_closed(const TermPtr& t) {
    std::vector<std::string> vars;
    collect_tuplix_variables(t, vars);
    return vars.empty();
}

/// Attributes of the entries occurring in the term.
inline void collect_attribute_support(const TermPtr& t, AttrSet& out) {
    switch (t->kind) {
        case TKind::Entry: out.insert(t->attribute); return;
        case TKind::Conj:
        case TKind::Choice:
            collect_attribute_support(t->left, out);
            collect_attribute_support(t->right, out);
            return;
        case TKind::Sum:
        case TKind::Scalar:
        case TKind::Clear:
        case TKind::Encap:
        case TKind::Select:
            collect_attribute_support(t->left, out);
            return;
        default: return;
    }
}

inline AttrSet attribute_support(const TermPtr& t) {
    AttrSet out;
    collect_attribute_support(t, out);
    return out;
}

/// First name of the form w1, w2, ... that avoids the given set.
inline std::string fresh_variable(const std::set<std::string>& avoid) {
    for (int i = 1;; ++i) {
        std::string cand = "w" + std::to_string(i);
        if (!avoid.count(cand)) return cand;
    }
}

/// t[p/u]: replaces free occurrences of u; binders that would capture a
/// variable of p are renamed first, so substitution is always safe.
inline TermPtr substitute_data(const TermPtr& t, const std::string& u, const DataTermPtr& p) {
    switch (t->kind) {
        case TKind::Empty:
        case TKind::Null:
        case TKind::Var:
            return t;
        case TKind::Ref:
            throw Error("unresolved reference in engine term: @" + t->name);
        case TKind::Entry:
            return tt::entry(t->attribute, substitute(t->data, u, p));
        case TKind::Test:
            return tt::test(substitute(t->data, u, p));
        case TKind::Conj:
            return tt::conj(substitute_data(t->left, u, p), substitute_data(t->right, u, p));
        case TKind::Choice:
            return tt::choice(substitute_data(t->left, u, p), substitute_data(t->right, u, p));
        case TKind::Scalar:
            return tt::scalar(substitute(t->data, u, p), substitute_data(t->left, u, p));
        case TKind::Clear:
            return tt::clear(t->attributes, substitute_data(t->left, u, p));
        case TKind::Encap:
            return tt::encap(t->attributes, substitute_data(t->left, u, p));
        case TKind::Select:
            return tt::select(t->attributes, substitute_data(t->left, u, p));
        case TKind::Sum: {
            if (t->name == u) return t;  // u is bound here; no free occurrences below
            if (!free_data_variables(t->left).count(u)) return t;
            std::set<std::string> pvars = variables(p);
            if (pvars.count(t->name)) {
                std::set<std::string> avoid = all_data_variables(t->left);
                avoid.insert(pvars.begin(), pvars.end());
                avoid.insert(u);
                std::string w = fresh_variable(avoid);
                TermPtr body = substitute_data(t->left, t->name, dt::variable(w));
                return tt::sum(w, substitute_data(body, u, p));
            }
            return tt::sum(t->name, substitute_data(t->left, u, p));
        }
    }
    throw Error("corrupt tuplix term");
}

/// Replaces a tuplix variable by a term (tuplix variables are never bound).
inline TermPtr substitute_tuplix_var(const TermPtr& t, const std::string& x, const TermPtr& r) {
    switch (t->kind) {
        case TKind::Var: return t->name == x ? r : t;
        case TKind::Conj:
            return tt::conj(substitute_tuplix_var(t->left, x, r), substitute_tuplix_var(t->right, x, r));
        case TKind::Choice:
            return tt::choice(substitute_tuplix_var(t->left, x, r), substitute_tuplix_var(t->right, x, r));
        case TKind::Sum: return tt::sum(t->name, substitute_tuplix_var(t->left, x, r));
        case TKind::Scalar: return tt::scalar(t->data, substitute_tuplix_var(t->left, x, r));
        case TKind::Clear: return tt::clear(t->attributes, substitute_tuplix_var(t->left, x, r));
        case TKind::Encap: return tt::encap(t->attributes, substitute_tuplix_var(t->left, x, r));
        case TKind::Select: return tt::select(t->attributes, substitute_tuplix_var(t->left, x, r));
        default: return t;
    }
}

namespace detail {

using BinderMap = std::map<std::string, int>;

inline bool alpha_equal_data(const DataTermPtr& a, const DataTermPtr& b, const BinderMap& ma,
                             const BinderMap& mb) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case DtKind::Constant: return a->value == b->value;
        case DtKind::Variable: {
            auto ia = ma.find(a->name);
            auto ib = mb.find(b->name);
            if ((ia == ma.end()) != (ib == mb.end())) return false;
            if (ia == ma.end()) return a->name == b->name;
            return ia->second == ib->second;
        }
        case DtKind::Add:
        case DtKind::Mul:
            return alpha_equal_data(a->lhs, b->lhs, ma, mb) && alpha_equal_data(a->rhs, b->rhs, ma, mb);
        case DtKind::Neg:
        case DtKind::Inv:
        case DtKind::Abs:
            return alpha_equal_data(a->lhs, b->lhs, ma, mb);
    }
    return false;
}

inline bool alpha_equal_rec(const TermPtr& a, const TermPtr& b, BinderMap ma, BinderMap mb, int depth) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case TKind::Empty:
        case TKind::Null:
            return true;
        case TKind::Var:
        case TKind::Ref:
            return a->name == b->name;
        case TKind::Entry:
            return a->attribute == b->attribute && alpha_equal_data(a->data, b->data, ma, mb);
        case TKind::Test:
            return alpha_equal_data(a->data, b->data, ma, mb);
        case TKind::Conj:
        case TKind::Choice:
            return alpha_equal_rec(a->left, b->left, ma, mb, depth) &&
                   alpha_equal_rec(a->right, b->right, ma, mb, depth);
        case TKind::Scalar:
            return alpha_equal_data(a->data, b->data, ma, mb) &&
                   alpha_equal_rec(a->left, b->left, ma, mb, depth);
        case TKind::Clear:
        case TKind::Encap:
        case TKind::Select:
            return a->attributes == b->attributes && alpha_equal_rec(a->left, b->left, ma, mb, depth);
        case TKind::Sum: {
            ma[a->name] = depth;
            mb[b->name] = depth;
            return alpha_equal_rec(a->left, b->left, std::move(ma), std::move(mb), depth + 1);
        }
    }
    return false;
}

}  // namespace detail

/// Equality up to consistent renaming of summation binders.
inline bool alpha_equal(const TermPtr& a, const TermPtr& b) {
    return detail::alpha_equal_rec(a, b, {}, {}, 0);
}

inline bool structurally_equal(const TermPtr& a, const TermPtr& b) {
    if (a.get() == b.get()) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case TKind::Empty:
        case TKind::Null:
            return true;
        case TKind::Var:
        case TKind::Ref:
            return a->name == b->name;
        case TKind::Entry:
            return a->attribute == b->attribute && structurally_equal(a->data, b->data);
        case TKind::Test:
            return structurally_equal(a->data, b->data);
        case TKind::Conj:
        case TKind::Choice:
            return structurally_equal(a->left, b->left) && structurally_equal(a->right, b->right);
        case TKind::Scalar:
            return structurally_equal(a->data, b->data) && structurally_equal(a->left, b->left);
        case TKind::Clear:
        case TKind::Encap:
        case TKind::Select:
            return a->attributes == b->attributes && structurally_equal(a->left, b->left);
        case TKind::Sum:
            return a->name == b->name && structurally_equal(a->left, b->left);
    }
    return false;
}

inline bool contains_kind(const TermPtr& t, TKind k) {
    if (t->kind == k) return true;
    switch (t->kind) {
        case TKind::Conj:
        case TKind::Choice:
            return contains_kind(t->left, k) || contains_kind(t->right, k);
        case TKind::Sum:
        case TKind::Scalar:
        case TKind::Clear:
        case TKind::Encap:
        case TKind::Select:
            return contains_kind(t->left, k);
        default: return false;
    }
}

}  // namespace tuplix
