#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tuplix/dataterm.hpp"

namespace tuplix {

// ---------------------------------------------------------------------------
// Sparse multilinear-style normal form for data terms.
//
// A polynomial is a map from monomials to nonzero rational coefficients. A
// monomial is a multiset of atoms. Atoms are data variables plus two kinds of
// opaque subterms: inverses and absolute values whose arguments could not be
// reduced away. Opaque atoms are keyed by the canonical rendering of their
// (normalized) argument, so syntactically different but normal-form-equal
// arguments share one atom.
//
// Two data terms with the same normal form are equal in every zero-totalized
// field; the converse does not hold once opaque atoms are involved.
// ---------------------------------------------------------------------------

enum class AtomKind { Variable, Inverse, AbsoluteValue };

struct Atom {
    AtomKind kind;
    std::string key;      // Variable: the name; otherwise rendering of argument
    DataTermPtr argument; // null for Variable

    static Atom variable(const std::string& name) { return Atom{AtomKind::Variable, name, nullptr}; }
    static Atom inverse(DataTermPtr arg) {
        std::string k = to_string(arg);
        return Atom{AtomKind::Inverse, std::move(k), std::move(arg)};
    }
    static Atom absolute(DataTermPtr arg) {
        std::string k = to_string(arg);
        return Atom{AtomKind::AbsoluteValue, std::move(k), std::move(arg)};
    }

    DataTermPtr term() const {
        switch (kind) {
            case AtomKind::Variable: return dt::variable(key);
            case AtomKind::Inverse: return dt::inv(argument);
            case AtomKind::AbsoluteValue: return dt::abs(argument);
        }
        throw Error("corrupt atom");
    }

    friend bool operator==(const Atom& a, const Atom& b) { return a.kind == b.kind && a.key == b.key; }
    friend bool operator<(const Atom& a, const Atom& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.key < b.key;
    }
};

using Monomial = std::map<Atom, int>;

namespace detail {

// x^(a+1) * (x^-1) = x^a lets paired exponents collapse; the pair (k, k)
// bottoms out at (1, 1), the idempotent "x is nonzero" indicator x * inv(x).
inline Monomial canonical_monomial(Monomial m) {
    std::vector<Atom> inverses;
    for (const auto& [atom, exp] : m)
        if (atom.kind == AtomKind::Inverse) inverses.push_back(atom);
    for (const Atom& ia : inverses) {
        Atom partner = Atom::variable("");
        if (ia.argument->kind == DtKind::Variable) {
            partner = Atom::variable(ia.argument->name);
        } else if (ia.argument->kind == DtKind::Abs) {
            partner = Atom::absolute(ia.argument->lhs);
        } else {
            continue;
        }
        auto pit = m.find(partner);
        if (pit == m.end()) continue;
        int a = pit->second;
        int b = m.at(ia);
        if (a > b) {
            pit->second = a - b;
            m.erase(ia);
        } else if (a < b) {
            m.erase(partner);
            m[ia] = b - a;
        } else {
            pit->second = 1;
            m[ia] = 1;
        }
    }
    return m;
}

}  // namespace detail

class Polynomial {
public:
    using Terms = std::map<Monomial, Quantity>;

    Polynomial() = default;

    static Polynomial zero() { return Polynomial(); }
    static Polynomial constant(const Quantity& c) {
        Polynomial p;
        if (!c.is_zero()) p.terms_[Monomial{}] = c;
        return p;
    }
    static Polynomial one() { return constant(Quantity(1)); }
    static Polynomial variable(const std::string& name) { return atom(Atom::variable(name), 1); }
    static Polynomial atom(const Atom& a, int exp) {
        Polynomial p;
        Monomial m;
        m[a] = exp;
        p.terms_[std::move(m)] = Quantity(1);
        return p;
    }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
    }
    Quantity constant_value() const {
        if (terms_.empty()) return Quantity(0);
        return terms_.begin()->second;  // only sensible when is_constant()
    }
    bool single_term() const { return terms_.size() == 1; }
    Quantity leading_coefficient() const {
        return terms_.empty() ? Quantity(0) : terms_.begin()->second;
    }
    /// Coefficient of the highest monomial; scaling by its inverse gives the
    /// canonical representative of a term under nonzero rational scaling.
    Quantity trailing_coefficient() const {
        return terms_.empty() ? Quantity(0) : terms_.rbegin()->second;
    }
    Polynomial monic() const { return scale(trailing_coefficient().inverse()); }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        Polynomial out = a;
        for (const auto& [m, c] : b.terms_) out.add_term(m, c);
        return out;
    }
    Polynomial scale(const Quantity& c) const {
        Polynomial out;
        if (c.is_zero()) return out;
        for (const auto& [m, k] : terms_) out.terms_[m] = k * c;
        return out;
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        return a + b.scale(Quantity(-1));
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial out;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) {
                Monomial m = ma;
                for (const auto& [atom, exp] : mb) m[atom] += exp;
                out.add_term(detail::canonical_monomial(std::move(m)), ca * cb);
            }
        return out;
    }
    Polynomial pow(int k) const {
        Polynomial out = one();
        for (int i = 0; i < k; ++i) out = out * *this;
        return out;
    }

    /// Atom-wise minimum exponent over all monomials (empty when no common factor).
    Monomial content_monomial() const {
        Monomial g;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            if (first) {
                g = m;
                first = false;
                continue;
            }
            Monomial next;
            for (const auto& [atom, exp] : g) {
                auto it = m.find(atom);
                if (it != m.end()) next[atom] = std::min(exp, it->second);
            }
            g = std::move(next);
            if (g.empty()) break;
        }
        return g;
    }

    Polynomial divide_monomial(const Monomial& g) const {
        Polynomial out;
        for (const auto& [m, c] : terms_) {
            Monomial q = m;
            for (const auto& [atom, exp] : g) {
                auto it = q.find(atom);
                it->second -= exp;
                if (it->second == 0) q.erase(it);
            }
            out.terms_[std::move(q)] = c;
        }
        return out;
    }

    /// Canonical data term denoting this polynomial.
    DataTermPtr embed() const {
        if (terms_.empty()) return dt::zero();
        DataTermPtr acc;
        for (const auto& [m, c] : terms_) {
            DataTermPtr mono;
            for (const auto& [atom, exp] : m) {
                DataTermPtr at = atom.term();
                for (int i = 0; i < exp; ++i) mono = mono ? dt::mul(mono, at) : at;
            }
            if (!acc) {
                if (!mono)
                    acc = dt::constant(c);
                else if (c.is_one())
                    acc = mono;
                else if (c == Quantity(-1))
                    acc = dt::neg(mono);
                else
                    acc = dt::mul(dt::constant(c), mono);
            } else {
                if (!mono) {
                    acc = c.is_negative() ? dt::sub(acc, dt::constant(-c)) : dt::add(acc, dt::constant(c));
                } else if (c.is_one()) {
                    acc = dt::add(acc, mono);
                } else if (c == Quantity(-1)) {
                    acc = dt::sub(acc, mono);
                } else if (c.is_negative()) {
                    acc = dt::sub(acc, dt::mul(dt::constant(-c), mono));
                } else {
                    acc = dt::add(acc, dt::mul(dt::constant(c), mono));
                }
            }
        }
        return acc;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }
    friend bool operator<(const Polynomial& a, const Polynomial& b) { return a.terms_ < b.terms_; }

private:
    void add_term(const Monomial& m, const Quantity& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_[m] = c;
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    Terms terms_;
};

Polynomial normal_form(const DataTermPtr& t);

namespace detail {

/// Inverse of a normal form, rewriting to fixpoint:
/// constants invert exactly, products invert factor-wise, double inverses
/// cancel, and what remains (inverse of a sum or of a lone variable) becomes
/// an opaque atom over a sign/scale-canonicalized argument.
inline Polynomial invert(const Polynomial& p) {
    if (p.is_zero()) return p;  // 0^-1 = 0
    if (p.single_term()) {
        const auto& [m, c] = *p.terms().begin();
        Polynomial out = Polynomial::constant(c.inverse());
        for (const auto& [atom, exp] : m) {
            switch (atom.kind) {
                case AtomKind::Variable:
                case AtomKind::AbsoluteValue:
                    out = out * Polynomial::atom(Atom::inverse(atom.term()), exp);
                    break;
                case AtomKind::Inverse:
                    out = out * normal_form(atom.argument).pow(exp);
                    break;
            }
        }
        return out;
    }
    Monomial g = p.content_monomial();
    Polynomial q = g.empty() ? p : p.divide_monomial(g);
    Quantity scale = q.trailing_coefficient();
    Polynomial monic = q.monic();
    Polynomial out = Polynomial::constant(scale.inverse());
    if (!g.empty()) {
        Polynomial gp = Polynomial::one();
        for (const auto& [atom, exp] : g) gp = gp * Polynomial::atom(atom, exp);
        out = out * invert(gp);
    }
    return out * Polynomial::atom(Atom::inverse(monic.embed()), 1);
}

/// Absolute value of a normal form. |x*y| = |x|*|y| and |1/x| = 1/|x| hold in
/// the ordered rationals (also at 0 under the totalized inverse), so absolute
/// values distribute over monomials; sums become opaque atoms with the sign
/// and scale factored out.
inline Polynomial absolute(const Polynomial& p) {
    if (p.is_zero()) return p;
    if (p.is_constant()) return Polynomial::constant(p.constant_value().abs());
    if (p.single_term()) {
        const auto& [m, c] = *p.terms().begin();
        Polynomial out = Polynomial::constant(c.abs());
        for (const auto& [atom, exp] : m) {
            switch (atom.kind) {
                case AtomKind::Variable:
                    out = out * Polynomial::atom(Atom::absolute(atom.term()), exp);
                    break;
                case AtomKind::AbsoluteValue:
                    out = out * Polynomial::atom(atom, exp);
                    break;
                case AtomKind::Inverse:
                    out = out * Polynomial::atom(Atom::inverse(dt::abs(atom.argument)), exp);
                    break;
            }
        }
        return out;
    }
    Monomial g = p.content_monomial();
    Polynomial q = g.empty() ? p : p.divide_monomial(g);
    Quantity scale = q.trailing_coefficient();
    Polynomial monic = q.monic();
    Polynomial out = Polynomial::constant(scale.abs());
    if (!g.empty()) {
        Polynomial gp = Polynomial::one();
        for (const auto& [atom, exp] : g) gp = gp * Polynomial::atom(atom, exp);
        out = out * absolute(gp);
    }
    return out * Polynomial::atom(Atom::absolute(monic.embed()), 1);
}

}  // namespace detail

inline Polynomial normal_form(const DataTermPtr& t) {
    switch (t->kind) {
        case DtKind::Constant: return Polynomial::constant(t->value);
        case DtKind::Variable: return Polynomial::variable(t->name);
        case DtKind::Add: return normal_form(t->lhs) + normal_form(t->rhs);
        case DtKind::Mul: return normal_form(t->lhs) * normal_form(t->rhs);
        case DtKind::Neg: return normal_form(t->lhs).scale(Quantity(-1));
        case DtKind::Inv: return detail::invert(normal_form(t->lhs));
        case DtKind::Abs: return detail::absolute(normal_form(t->lhs));
    }
    throw Error("corrupt data term");
}

/// embed(normal_form(t)) — the canonical representative of t's class.
inline DataTermPtr normalized_term(const DataTermPtr& t) { return normal_form(t).embed(); }

/// Substitution performed on normal forms (opaque-atom arguments included).
inline Polynomial substitute(const Polynomial& p, const std::string& var, const DataTermPtr& replacement) {
    return normal_form(substitute(p.embed(), var, replacement));
}

// ---------------------------------------------------------------------------
// Randomized zero oracle.
// ---------------------------------------------------------------------------

namespace sampling {

/// The probe pool: zero first, then small integers and fractions. Zero must be
/// present so that the branch points of the totalized inverse are exercised.
inline const std::vector<Quantity>& pool() {
    static const std::vector<Quantity> p = {
        Quantity(0),  Quantity(1),     Quantity(-1),    Quantity(2),    Quantity(-2),
        Quantity(1, 2), Quantity(-1, 2), Quantity(1, 3), Quantity(-1, 3)};
    return p;
}

inline Quantity random_rational(std::mt19937_64& rng) {
    long long num = static_cast<long long>(rng() % 13) - 6;
    long long den = static_cast<long long>(rng() % 6) + 1;
    return Quantity(num, den);
}

inline Quantity random_pool_or_rational(std::mt19937_64& rng) {
    if (rng() % 2 == 0) return pool()[rng() % pool().size()];
    return random_rational(rng);
}

/// Deterministic sample schedule: the all-zero, all-one and all-minus-one
/// environments come first, then (for at most two variables) the full pool
/// grid, then seeded random draws.
inline Environment sample_environment(const std::vector<std::string>& vars, std::uint64_t index,
                                      std::mt19937_64& rng) {
    Environment env;
    if (index == 0) {
        for (const auto& v : vars) env[v] = Quantity(0);
        return env;
    }
    if (index == 1) {
        for (const auto& v : vars) env[v] = Quantity(1);
        return env;
    }
    if (index == 2) {
        for (const auto& v : vars) env[v] = Quantity(-1);
        return env;
    }
    const auto& p = pool();
    if (!vars.empty() && vars.size() <= 2) {
        std::uint64_t grid = 1;
        for (std::size_t i = 0; i < vars.size(); ++i) grid *= p.size();
        std::uint64_t k = index - 3;
        if (k < grid) {
            for (const auto& v : vars) {
                env[v] = p[k % p.size()];
                k /= p.size();
            }
            return env;
        }
    }
    for (const auto& v : vars) env[v] = random_pool_or_rational(rng);
    return env;
}

}  // namespace sampling

struct ZeroVerdict {
    enum class Kind { Valid, Invalid, Unknown };
    Kind kind;
    Environment witness;  // evaluates the term to a nonzero quantity (Invalid only)

    bool valid() const { return kind == Kind::Valid; }
    bool invalid() const { return kind == Kind::Invalid; }
};

/// Is the term zero in every zero-totalized field?
///
/// Valid is decided soundly from the normal form alone. Otherwise sampled
/// environments look for a refuting witness; if none is found the verdict is
/// Unknown (the term may still be identically zero, e.g. through an opaque
/// inverse that the normal form cannot cancel).
inline ZeroVerdict decide_zero(const DataTermPtr& t, int samples, std::uint64_t seed) {
    if (normal_form(t).is_zero()) return {ZeroVerdict::Kind::Valid, {}};
    std::vector<std::string> vars;
    for (const auto& v : variables(t)) vars.push_back(v);
    std::mt19937_64 rng(seed);
    int budget = vars.empty() ? (samples > 0 ? 1 : 0) : samples;
    for (int i = 0; i < budget; ++i) {
        Environment env = sampling::sample_environment(vars, static_cast<std::uint64_t>(i), rng);
        if (!evaluate(t, env).is_zero()) return {ZeroVerdict::Kind::Invalid, env};
    }
    return {ZeroVerdict::Kind::Unknown, {}};
}

}  // namespace tuplix
