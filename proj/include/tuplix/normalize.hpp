#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tuplix/poly.hpp"
#include "tuplix/printer.hpp"
#include "tuplix/term.hpp"

namespace tuplix {

// ---------------------------------------------------------------------------
// Canonical forms.
//
// A conjunctive term canonicalizes to: one combined test, entries with
// pairwise distinct attributes, and a multiset of tuplix variables. A term of
// the choice fragment canonicalizes to a finite, duplicate-free set of such
// alternatives (the empty set denotes delta).
//
// Test canonicalization goes beyond per-term normal forms: the affine test
// conjuncts are brought into reduced row echelon form, and every solved
// variable is substituted into the entries and the remaining conjuncts
// (conditional rewriting: under test(u - p), u may be replaced by p). This
// makes equivalent affine test systems syntactically identical.
// ---------------------------------------------------------------------------

struct CanonicalAlternative {
    bool null = false;                      // the distinguished delta canonical (test 1)
    std::vector<Polynomial> tests;          // canonical conjuncts, sorted, deduplicated
    std::map<Attribute, Polynomial> entries;  // value 0 is a real entry, not absence
    std::vector<std::string> variables;     // tuplix-variable multiset, sorted

    /// Single test argument: 0 for none, the sole conjunct, or sum of p/p.
    DataTermPtr combined_test() const {
        if (null) return dt::one();
        if (tests.empty()) return dt::zero();
        if (tests.size() == 1) return tests.front().embed();
        Polynomial acc;
        for (const auto& p : tests) acc = acc + p * detail::invert(p);
        return acc.embed();
    }

    friend bool operator==(const CanonicalAlternative& a, const CanonicalAlternative& b) {
        if (a.null != b.null) return false;
        if (a.null) return true;
        return a.tests == b.tests && a.entries == b.entries && a.variables == b.variables;
    }
    friend bool operator!=(const CanonicalAlternative& a, const CanonicalAlternative& b) {
        return !(a == b);
    }
    friend bool operator<(const CanonicalAlternative& a, const CanonicalAlternative& b) {
        if (a.null != b.null) return b.null;
        if (a.null) return false;
        if (a.tests != b.tests) return a.tests < b.tests;
        if (a.entries != b.entries) return a.entries < b.entries;
        return a.variables < b.variables;
    }
};

struct CanonicalForm {
    std::vector<CanonicalAlternative> alternatives;  // sorted, deduplicated; empty = delta

    bool is_null() const { return alternatives.empty(); }
    friend bool operator==(const CanonicalForm& a, const CanonicalForm& b) {
        return a.alternatives == b.alternatives;
    }
    friend bool operator!=(const CanonicalForm& a, const CanonicalForm& b) { return !(a == b); }
};

namespace detail {

struct AffineRow {
    std::map<std::string, Quantity> coeffs;
    Quantity constant;
};

inline bool is_affine(const Polynomial& p) {
    for (const auto& [m, c] : p.terms()) {
        if (m.empty()) continue;
        if (m.size() != 1) return false;
        const auto& [atom, exp] = *m.begin();
        if (atom.kind != AtomKind::Variable || exp != 1) return false;
    }
    return true;
}

inline AffineRow to_row(const Polynomial& p) {
    AffineRow row;
    for (const auto& [m, c] : p.terms()) {
        if (m.empty())
            row.constant += c;
        else
            row.coeffs[m.begin()->first.key] += c;
    }
    return row;
}

inline Polynomial row_to_poly(const AffineRow& row) {
    Polynomial p = Polynomial::constant(row.constant);
    for (const auto& [v, c] : row.coeffs)
        if (!c.is_zero()) p = p + Polynomial::variable(v).scale(c);
    return p;
}

struct RrefResult {
    bool inconsistent = false;
    std::vector<Polynomial> rows;                      // pivot rows, sorted by pivot
    std::map<std::string, DataTermPtr> solved;         // pivot -> replacement term
};

/// Reduced row echelon form of an affine conjunct system; unique for the
/// solution space, with variables ordered by name.
inline RrefResult rref(const std::vector<Polynomial>& affine) {
    RrefResult out;
    std::vector<AffineRow> rows;
    std::set<std::string> varset;
    for (const auto& p : affine) {
        rows.push_back(to_row(p));
        for (const auto& [v, c] : rows.back().coeffs) varset.insert(v);
    }
    std::vector<std::string> pivot_vars;
    std::vector<std::size_t> pivot_rows;
    std::vector<bool> used(rows.size(), false);
    for (const auto& v : varset) {
        std::size_t found = rows.size();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (used[i]) continue;
            auto it = rows[i].coeffs.find(v);
            if (it != rows[i].coeffs.end() && !it->second.is_zero()) {
                found = i;
                break;
            }
        }
        if (found == rows.size()) continue;
        AffineRow& pr = rows[found];
        Quantity inv = pr.coeffs[v].inverse();
        for (auto& [w, c] : pr.coeffs) c *= inv;
        pr.constant *= inv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == found) continue;
            auto it = rows[i].coeffs.find(v);
            if (it == rows[i].coeffs.end() || it->second.is_zero()) continue;
            Quantity f = it->second;
            for (const auto& [w, c] : pr.coeffs) rows[i].coeffs[w] -= f * c;
            rows[i].constant -= f * pr.constant;
        }
        used[found] = true;
        pivot_vars.push_back(v);
        pivot_rows.push_back(found);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (used[i]) continue;
        bool allzero = true;
        for (const auto& [w, c] : rows[i].coeffs)
            if (!c.is_zero()) allzero = false;
        if (allzero && !rows[i].constant.is_zero()) {
            out.inconsistent = true;
            return out;
        }
    }
    for (std::size_t k = 0; k < pivot_vars.size(); ++k) {
        const AffineRow& row = rows[pivot_rows[k]];
        out.rows.push_back(row_to_poly(row));
        // pivot coefficient is 1: v = -(rest)
        AffineRow rest = row;
        rest.coeffs.erase(pivot_vars[k]);
        Polynomial rhs = row_to_poly(rest).scale(Quantity(-1));
        out.solved[pivot_vars[k]] = rhs.embed();
    }
    std::sort(out.rows.begin(), out.rows.end());
    return out;
}

/// Canonicalizes one conjunctive term. Collects entries (merging equal
/// attributes additively), test conjuncts and tuplix variables, then closes
/// the test system under solved-form substitution.
class AlternativeBuilder {
public:
    void add_term(const TermPtr& t) {
        switch (t->kind) {
            case TKind::Empty: return;
            case TKind::Null: null_ = true; return;
            case TKind::Conj:
                add_term(t->left);
                add_term(t->right);
                return;
            case TKind::Entry: {
                Polynomial p = normal_form(t->data);
                auto it = entries_.find(t->attribute);
                if (it == entries_.end())
                    entries_[t->attribute] = p;
                else
                    it->second = it->second + p;
                return;
            }
            case TKind::Test: add_conjunct(normal_form(t->data)); return;
            case TKind::Var: tvars_.push_back(t->name); return;
            default: throw FragmentError("conjunctive", kind_name(t->kind));
        }
    }

    CanonicalAlternative finish() {
        std::size_t guard = all_variable_count() + 3;
        for (std::size_t round = 0; round < guard && !null_; ++round) {
            RrefResult r = rref(affine_);
            if (r.inconsistent) {
                null_ = true;
                break;
            }
            affine_ = r.rows;
            solved_ = r.solved;
            if (other_.empty() || solved_.empty()) break;
            std::vector<Polynomial> pending;
            pending.swap(other_);
            std::size_t affine_before = affine_.size();
            for (const auto& p : pending) add_conjunct(substitute_all(p));
            if (null_ || affine_.size() == affine_before) break;
        }
        CanonicalAlternative alt;
        if (null_) {
            alt.null = true;
            return alt;
        }
        for (auto& [a, p] : entries_) alt.entries[a] = substitute_all(p);
        alt.tests = affine_;
        alt.tests.insert(alt.tests.end(), other_.begin(), other_.end());
        std::sort(alt.tests.begin(), alt.tests.end());
        alt.tests.erase(std::unique(alt.tests.begin(), alt.tests.end()), alt.tests.end());
        alt.variables = tvars_;
        std::sort(alt.variables.begin(), alt.variables.end());
        if (!alt.tests.empty()) {
            // A test that can never be zero nullifies the alternative.
            DataTermPtr s = alt.combined_test();
            DataTermPtr complement = dt::sub(dt::one(), dt::div(s, s));
            if (decide_zero(complement, 0, 0).valid()) {
                alt = CanonicalAlternative();
                alt.null = true;
            }
        }
        return alt;
    }

private:
    // Conjunct canonicalization. Constant conjuncts decide the alternative
    // outright. Zero tests of products decompose: exponents drop (x^2 = 0 iff
    // x = 0) and opaque inverse/absolute factors are replaced by their
    // arguments (inv(x) = 0 iff x = 0, |x| = 0 iff x = 0). Sums are scaled to
    // a canonical representative (test(u) = test(n*u) for nonzero rationals).
    void add_conjunct(const Polynomial& p) {
        if (null_) return;
        if (p.is_zero()) return;
        if (p.is_constant()) {
            null_ = true;
            return;
        }
        if (p.single_term()) {
            const auto& [m, c] = *p.terms().begin();
            bool plain = c.is_one();
            if (plain)
                for (const auto& [atom, exp] : m)
                    if (atom.kind != AtomKind::Variable || exp != 1) plain = false;
            if (!plain) {
                Polynomial prod = Polynomial::one();
                for (const auto& [atom, exp] : m) {
                    if (atom.kind == AtomKind::Variable)
                        prod = prod * Polynomial::variable(atom.key);
                    else
                        prod = prod * normal_form(atom.argument);
                }
                add_conjunct(prod);
                return;
            }
            if (m.size() == 1) {
                affine_.push_back(p);
            } else {
                other_.push_back(p);
            }
            return;
        }
        Polynomial monic = p.monic();
        if (is_affine(monic))
            affine_.push_back(monic);
        else
            other_.push_back(monic);
    }

    Polynomial substitute_all(Polynomial p) const {
        for (const auto& [v, r] : solved_) p = substitute(p, v, r);
        return p;
    }

    std::size_t all_variable_count() const {
        std::set<std::string> vars;
        auto scan = [&](const Polynomial& p) {
            for (const auto& v : variables(p.embed())) vars.insert(v);
        };
        for (const auto& p : affine_) scan(p);
        for (const auto& p : other_) scan(p);
        return vars.size();
    }

    bool null_ = false;
    std::vector<Polynomial> affine_;
    std::vector<Polynomial> other_;
    std::map<Attribute, Polynomial> entries_;
    std::vector<std::string> tvars_;
    std::map<std::string, DataTermPtr> solved_;
};

}  // namespace detail

/// Canonical form of a term of the conjunctive fragment (tests, entries,
/// tuplix variables under &). Throws FragmentError on other operators.
inline CanonicalAlternative to_canonical_alternative(const TermPtr& t) {
    detail::AlternativeBuilder b;
    b.add_term(t);
    return b.finish();
}

inline TermPtr embed(const CanonicalAlternative& alt) {
    if (alt.null) return tt::null();
    std::vector<TermPtr> parts;
    for (const auto& p : alt.tests) parts.push_back(tt::test(p.embed()));
    for (const auto& [a, p] : alt.entries) parts.push_back(tt::entry(a, p.embed()));
    for (const auto& x : alt.variables) parts.push_back(tt::tvar(x));
    return tt::conj_all(parts);
}

namespace detail {

// Splits a test over a syntactically present product into a choice of
// factor tests: test(p*q) = test(p) + test(q). Sign is immaterial.
inline void split_test_argument(const DataTermPtr& p, std::vector<DataTermPtr>& out) {
    if (p->kind == DtKind::Mul) {
        split_test_argument(p->lhs, out);
        split_test_argument(p->rhs, out);
        return;
    }
    if (p->kind == DtKind::Neg) {
        split_test_argument(p->lhs, out);
        return;
    }
    out.push_back(p);
}

inline void expand_alternatives(const TermPtr& t, std::vector<TermPtr>& out) {
    switch (t->kind) {
        case TKind::Null: return;  // no alternatives
        case TKind::Choice:
            expand_alternatives(t->left, out);
            expand_alternatives(t->right, out);
            return;
        case TKind::Conj: {
            std::vector<TermPtr> ls, rs;
            expand_alternatives(t->left, ls);
            expand_alternatives(t->right, rs);
            for (const auto& l : ls)
                for (const auto& r : rs) out.push_back(tt::conj(l, r));
            return;
        }
        case TKind::Test: {
            std::vector<DataTermPtr> factors;
            split_test_argument(t->data, factors);
            if (factors.size() == 1) {
                out.push_back(t);
            } else {
                for (const auto& f : factors) out.push_back(tt::test(f));
            }
            return;
        }
        case TKind::Empty:
        case TKind::Entry:
        case TKind::Var:
            out.push_back(t);
            return;
        default: throw FragmentError("alternative", kind_name(t->kind));
    }
}

// A canonical conjunct that is a product of several variables splits into a
// choice of variable tests (a nonzero-product test holds iff some factor is
// zero... precisely: the product is zero iff some factor is zero).
inline void split_monomial_tests(const CanonicalAlternative& alt,
                                 std::vector<CanonicalAlternative>& out) {
    if (!alt.null) {
        for (std::size_t i = 0; i < alt.tests.size(); ++i) {
            const Polynomial& p = alt.tests[i];
            if (!p.single_term()) continue;
            const auto& m = p.terms().begin()->first;
            if (m.size() < 2) continue;
            for (const auto& [atom, exp] : m) {
                std::vector<TermPtr> parts;
                for (std::size_t j = 0; j < alt.tests.size(); ++j) {
                    if (j == i)
                        parts.push_back(tt::test(dt::variable(atom.key)));
                    else
                        parts.push_back(tt::test(alt.tests[j].embed()));
                }
                for (const auto& [a, q] : alt.entries) parts.push_back(tt::entry(a, q.embed()));
                for (const auto& x : alt.variables) parts.push_back(tt::tvar(x));
                CanonicalAlternative sub = to_canonical_alternative(tt::conj_all(parts));
                if (!sub.null) split_monomial_tests(sub, out);
            }
            return;
        }
    }
    out.push_back(alt);
}

}  // namespace detail

/// Canonical form over the choice fragment: distributes choice over
/// conjunction, canonicalizes each summand, drops delta summands and
/// duplicates. The input must be free of summation and the auxiliary
/// operators (eliminate them first).
inline CanonicalForm canonicalize(const TermPtr& t) {
    std::vector<TermPtr> raw;
    detail::expand_alternatives(t, raw);
    CanonicalForm form;
    for (const auto& a : raw) {
        CanonicalAlternative alt = to_canonical_alternative(a);
        if (alt.null) continue;
        detail::split_monomial_tests(alt, form.alternatives);
    }
    std::sort(form.alternatives.begin(), form.alternatives.end());
    form.alternatives.erase(std::unique(form.alternatives.begin(), form.alternatives.end()),
                            form.alternatives.end());
    return form;
}

inline TermPtr embed(const CanonicalForm& form) {
    if (form.alternatives.empty()) return tt::null();
    std::vector<TermPtr> parts;
    for (const auto& alt : form.alternatives) parts.push_back(embed(alt));
    return tt::choice_all(parts);
}

// ---------------------------------------------------------------------------
// Zero-test logic: tests compose as a small propositional logic.
// ---------------------------------------------------------------------------

/// "p is nonzero": test(1 - p/p).
inline TermPtr negate_test(const DataTermPtr& p) {
    return tt::test(dt::sub(dt::one(), dt::div(p, p)));
}

/// "p = 0 and q = 0" as one test argument.
inline DataTermPtr test_and(const DataTermPtr& p, const DataTermPtr& q) {
    return dt::add(dt::div(p, p), dt::div(q, q));
}

/// "p = 0 or q = 0" as one test argument.
inline DataTermPtr test_or(const DataTermPtr& p, const DataTermPtr& q) { return dt::mul(p, q); }

/// "p = 0 implies q = 0" as one test argument.
inline DataTermPtr test_implies(const DataTermPtr& p, const DataTermPtr& q) {
    return dt::mul(dt::sub(dt::one(), dt::div(p, p)), q);
}

/// "p <= q", reading |q-p| = q-p as the zero test of |q-p| - (q-p).
inline DataTermPtr test_leq(const DataTermPtr& p, const DataTermPtr& q) {
    return dt::sub(dt::abs(dt::sub(q, p)), dt::sub(q, p));
}

// ---------------------------------------------------------------------------
// Sound equality checking for the conjunctive fragment.
// ---------------------------------------------------------------------------

enum class Verdict { Equal, NotEqual, Unknown };

struct EqualityResult {
    Verdict verdict;
    Environment witness;  // meaningful for NotEqual
    int samples_used = 0;
};

namespace detail {

/// Closed-instance semantics of a conjunctive canonical: nothing for delta,
/// otherwise the single attribute-to-value map.
inline std::optional<std::map<Attribute, Quantity>> closed_instance(const TermPtr& t,
                                                                    const Environment& env) {
    TermPtr inst = t;
    for (const auto& [v, q] : env) inst = substitute_data(inst, v, dt::constant(q));
    CanonicalAlternative alt = to_canonical_alternative(inst);
    if (alt.null) return std::nullopt;
    std::map<Attribute, Quantity> out;
    for (const auto& [a, p] : alt.entries) out[a] = p.constant_value();
    return out;
}

inline TermPtr instantiate_tuplix_vars(const TermPtr& t, const AttrSet& support) {
    TermPtr out = t;
    std::vector<std::string> vars;
    collect_tuplix_variables(out, vars);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    for (const auto& x : vars) {
        Attribute a = "tv_" + x;
        while (support.count(a)) a += "_";
        out = substitute_tuplix_var(out, x, tt::entry(a, dt::one()));
    }
    return out;
}

}  // namespace detail

/// Decides equality of two conjunctive-fragment terms.
///
/// Equal is answered soundly: either the canonical forms coincide, or they
/// have the same shape and the test/entry differences are zero in every
/// zero-totalized field ((1 - p0/p0) * (p_i - q_i) = 0 makes entries agree
/// whenever the test passes). NotEqual carries a refuting environment found
/// by sampling. Everything else is Unknown.
inline EqualityResult check_equal(const TermPtr& s, const TermPtr& t, int samples = 256,
                                  std::uint64_t seed = 1) {
    CanonicalAlternative ca = to_canonical_alternative(s);
    CanonicalAlternative cb = to_canonical_alternative(t);
    if (ca == cb) return {Verdict::Equal, {}, 0};
    if (!ca.null && !cb.null && ca.variables == cb.variables) {
        bool same_attrs = ca.entries.size() == cb.entries.size();
        if (same_attrs) {
            auto ia = ca.entries.begin();
            auto ib = cb.entries.begin();
            for (; ia != ca.entries.end(); ++ia, ++ib)
                if (ia->first != ib->first) {
                    same_attrs = false;
                    break;
                }
        }
        if (same_attrs) {
            DataTermPtr p0 = ca.combined_test();
            DataTermPtr q0 = cb.combined_test();
            bool ok = decide_zero(dt::sub(dt::div(p0, p0), dt::div(q0, q0)), 0, seed).valid();
            if (ok) {
                for (auto ia = ca.entries.begin(), ib = cb.entries.begin(); ok && ia != ca.entries.end();
                     ++ia, ++ib) {
                    DataTermPtr diff = (ia->second - ib->second).embed();
                    ok = decide_zero(test_implies(p0, diff), 0, seed).valid();
                }
                if (ok) return {Verdict::Equal, {}, 0};
            }
        }
    }
    // Refutation by sampling closed instantiations.
    AttrSet support = attribute_support(s);
    for (const auto& a : attribute_support(t)) support.insert(a);
    TermPtr si = detail::instantiate_tuplix_vars(s, support);
    TermPtr ti = detail::instantiate_tuplix_vars(t, support);
    std::set<std::string> varset = free_data_variables(si);
    for (const auto& v : free_data_variables(ti)) varset.insert(v);
    std::vector<std::string> vars(varset.begin(), varset.end());
    std::mt19937_64 rng(seed);
    int budget = vars.empty() ? 1 : samples;
    for (int i = 0; i < budget; ++i) {
        Environment env = sampling::sample_environment(vars, static_cast<std::uint64_t>(i), rng);
        if (detail::closed_instance(si, env) != detail::closed_instance(ti, env))
            return {Verdict::NotEqual, env, i + 1};
    }
    return {Verdict::Unknown, {}, budget};
}

// ---------------------------------------------------------------------------
// Canonical pretty-printing.
// ---------------------------------------------------------------------------

inline std::string to_string(const CanonicalAlternative& alt) {
    if (alt.null) return "delta";
    std::vector<std::string> parts;
    DataTermPtr test = alt.combined_test();
    if (!(test->kind == DtKind::Constant && test->value.is_zero()))
        parts.push_back("test(" + to_string(test) + ")");
    for (const auto& [a, p] : alt.entries) parts.push_back(a + "(" + to_string(p.embed()) + ")");
    for (const auto& x : alt.variables) parts.push_back("$" + x);
    if (parts.empty()) return "eps";
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += " & ";
        out += parts[i];
    }
    return out;
}

inline std::string to_string(const CanonicalForm& form) {
    if (form.alternatives.empty()) return "delta";
    std::string out;
    for (std::size_t i = 0; i < form.alternatives.size(); ++i) {
        if (i) out += " + ";
        out += to_string(form.alternatives[i]);
    }
    return out;
}

}  // namespace tuplix
