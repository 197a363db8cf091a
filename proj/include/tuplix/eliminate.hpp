#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "tuplix/normalize.hpp"
#include "tuplix/printer.hpp"
#include "tuplix/term.hpp"

namespace tuplix {

// ---------------------------------------------------------------------------
// Elimination of the derived operators (scalar multiplication, clearing,
// encapsulation, summation) from tuplix-closed terms, towards the choice
// fragment. Rule labels in traces follow the axiom names of the calculus.
// ---------------------------------------------------------------------------

struct EliminationStep {
    std::string rule;
    std::string detail;
};

struct EliminationReport {
    TermPtr result;
    std::vector<EliminationStep> steps;
    bool residual = false;  // set when a summation binder could not be discharged
    bool trace = false;

    void step(const char* rule, const std::string& detail) {
        if (trace) steps.push_back({rule, detail});
    }
};

namespace detail {

TermPtr eliminate_rec(const TermPtr& t, EliminationReport& rep);

// --- scalar multiplication --------------------------------------------------

inline TermPtr push_scalar(const DataTermPtr& p, const TermPtr& t, EliminationReport& rep) {
    switch (t->kind) {
        case TKind::Empty: rep.step("Sc1", "scalar over eps"); return t;
        case TKind::Null: rep.step("Sc2", "scalar over delta"); return t;
        case TKind::Test: rep.step("Sc3", "scalar over " + to_string(t)); return t;
        case TKind::Entry:
            if (rep.trace) rep.step("Sc4", to_string(p) + " * " + to_string(t));
            return tt::entry(t->attribute, dt::mul(p, t->data));
        case TKind::Conj:
            rep.step("Sc5", "scalar over &");
            return tt::conj(push_scalar(p, t->left, rep), push_scalar(p, t->right, rep));
        case TKind::Choice:
            rep.step("Sc6", "scalar over +");
            return tt::choice(push_scalar(p, t->left, rep), push_scalar(p, t->right, rep));
        case TKind::Sum: {
            std::string binder = t->name;
            TermPtr body = t->left;
            if (variables(p).count(binder)) {
                std::set<std::string> avoid = all_data_variables(body);
                for (const auto& v : variables(p)) avoid.insert(v);
                std::string w = fresh_variable(avoid);
                rep.step("S2", "rename " + binder + " to " + w);
                body = substitute_data(body, binder, dt::variable(w));
                binder = w;
            }
            rep.step("Sc7", "scalar under sum " + binder);
            return tt::sum(binder, push_scalar(p, body, rep));
        }
        case TKind::Var: throw ScalarOverTuplixVariableError();
        default: throw Error(std::string("scalar over unexpected node: ") + kind_name(t->kind));
    }
}

// --- clearing ----------------------------------------------------------------

inline TermPtr push_clear(const AttrSet& attrs, const TermPtr& t, EliminationReport& rep) {
    switch (t->kind) {
        case TKind::Empty: rep.step("Cl1", "clear over eps"); return t;
        case TKind::Null: rep.step("Cl2", "clear over delta"); return t;
        case TKind::Test: rep.step("Cl3", "clear over test"); return t;
        case TKind::Entry:
            if (attrs.count(t->attribute)) {
                if (rep.trace) rep.step("Cl4", "clear " + to_string(t));
                return tt::empty();
            }
            return t;
        case TKind::Conj:
            rep.step("Cl5", "clear over &");
            return tt::conj(push_clear(attrs, t->left, rep), push_clear(attrs, t->right, rep));
        case TKind::Choice:
            rep.step("Cl6", "clear over +");
            return tt::choice(push_clear(attrs, t->left, rep), push_clear(attrs, t->right, rep));
        case TKind::Sum:
            rep.step("Cl7", "clear under sum " + t->name);
            return tt::sum(t->name, push_clear(attrs, t->left, rep));
        case TKind::Var: throw ClearOverTuplixVariableError();
        default: throw Error(std::string("clear over unexpected node: ") + kind_name(t->kind));
    }
}

// --- summation ----------------------------------------------------------------

// Choice-normal expansion of a conjunction: a list of alternatives, each a
// flat atom list. Alternatives containing delta are dropped.
inline std::vector<std::vector<TermPtr>> distribute_conj(const TermPtr& t) {
    switch (t->kind) {
        case TKind::Null: return {};
        case TKind::Empty: return {{}};
        case TKind::Choice: {
            auto out = distribute_conj(t->left);
            auto r = distribute_conj(t->right);
            out.insert(out.end(), r.begin(), r.end());
            return out;
        }
        case TKind::Conj: {
            auto ls = distribute_conj(t->left);
            auto rs = distribute_conj(t->right);
            std::vector<std::vector<TermPtr>> out;
            for (const auto& l : ls)
                for (const auto& r : rs) {
                    std::vector<TermPtr> merged = l;
                    merged.insert(merged.end(), r.begin(), r.end());
                    out.push_back(std::move(merged));
                }
            return out;
        }
        default: return {{t}};
    }
}

/// If p is c*u + r with c a nonzero rational and u not occurring in r (not
/// even inside opaque atoms), returns the solution term r/(-c)... i.e. the
/// term to substitute for u so that p vanishes.
inline std::optional<DataTermPtr> solve_affine(const Polynomial& p, const std::string& u) {
    Monomial linear;
    linear[Atom::variable(u)] = 1;
    auto it = p.terms().find(linear);
    if (it == p.terms().end()) return std::nullopt;
    Quantity c = it->second;
    Polynomial rest = p;
    rest = rest - Polynomial::atom(Atom::variable(u), 1).scale(c);
    if (variables(rest.embed()).count(u)) return std::nullopt;
    // c*u + rest = 0  =>  u = rest * (-1/c)
    return rest.scale(-c.inverse()).embed();
}

inline bool univariate_in(const Polynomial& p, const std::string& u) {
    for (const auto& [m, c] : p.terms()) {
        if (m.empty()) continue;
        if (m.size() != 1) return false;
        const auto& [atom, exp] = *m.begin();
        if (!(atom.kind == AtomKind::Variable && atom.key == u)) return false;
    }
    return true;
}

inline int univariate_degree(const Polynomial& p, const std::string& u) {
    int d = 0;
    for (const auto& [m, c] : p.terms())
        if (!m.empty()) d = std::max(d, m.begin()->second);
    return d;
}

inline std::vector<BigInt> small_divisors(const BigInt& n) {
    std::vector<BigInt> out;
    BigInt a = n < 0 ? BigInt(-n) : n;
    for (BigInt d = 1; d * d <= a; ++d) {
        if (a % d == 0) {
            out.push_back(d);
            out.push_back(a / d);
        }
    }
    return out;
}

/// All rational roots of a univariate polynomial over the rationals, provided
/// the polynomial splits into linear factors over the rationals (rational
/// root search plus repeated synthetic division). Returns the distinct roots
/// in ascending order, or nothing if a nonlinear factor remains or the
/// coefficients are too large to factor.
inline std::optional<std::vector<Quantity>> rational_roots(const Polynomial& p, const std::string& u) {
    int deg = univariate_degree(p, u);
    if (deg < 1) return std::nullopt;
    std::vector<Quantity> coeffs(static_cast<std::size_t>(deg) + 1, Quantity(0));
    for (const auto& [m, c] : p.terms())
        coeffs[m.empty() ? 0 : static_cast<std::size_t>(m.begin()->second)] = c;

    std::vector<Quantity> roots;
    // roots at zero
    std::size_t shift = 0;
    while (shift < coeffs.size() && coeffs[shift].is_zero()) ++shift;
    if (shift > 0) {
        roots.push_back(Quantity(0));
        coeffs.erase(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(shift));
    }
    auto degree = [&] { return coeffs.size() - 1; };
    auto eval = [&](const Quantity& x) {
        Quantity acc(0);
        for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
        return acc;
    };
    auto divide_out = [&](const Quantity& r) {
        // coeffs / (u - r), exact by construction
        std::vector<Quantity> q(coeffs.size() - 1, Quantity(0));
        Quantity carry(0);
        for (std::size_t i = coeffs.size(); i-- > 1;) {
            carry = coeffs[i] + carry * r;
            q[i - 1] = carry;
        }
        coeffs = std::move(q);
    };

    if (degree() >= 1) {
        // integer form for the rational root candidates
        BigInt lcm = 1;
        for (const auto& c : coeffs) {
            BigInt d = c.denominator();
            lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
        }
        BigInt lead = (coeffs.back().value() * BigRational(lcm)).convert_to<BigInt>();
        BigInt cons = (coeffs.front().value() * BigRational(lcm)).convert_to<BigInt>();
        BigInt g = boost::multiprecision::gcd(lead, cons);
        if (g > 1) {
            lead /= g;
            cons /= g;
        }
        const BigInt limit = BigInt("1000000000000");
        if (boost::multiprecision::abs(cons) > limit || boost::multiprecision::abs(lead) > limit)
            return std::nullopt;
        std::vector<Quantity> candidates;
        for (const BigInt& pn : small_divisors(cons))
            for (const BigInt& qd : small_divisors(lead)) {
                candidates.push_back(Quantity(BigRational(pn, qd)));
                candidates.push_back(Quantity(BigRational(-pn, qd)));
            }
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        for (const auto& r : candidates) {
            bool hit = false;
            while (degree() >= 1 && eval(r).is_zero()) {
                divide_out(r);
                hit = true;
            }
            if (hit) roots.push_back(r);
            if (degree() == 0) break;
        }
    }
    if (degree() != 0) return std::nullopt;  // nonlinear remainder: not fully split
    std::sort(roots.begin(), roots.end());
    return roots;
}

/// Recognizes the normal form of "u - p is nonzero", i.e. 1 - X/X with X
/// affine in u: such a test offers one alternative per quantity except p,
/// which together cover everything.
inline bool matches_nonzero_affine_test(const Polynomial& p, const std::string& u) {
    Polynomial d = Polynomial::one() - p;
    if (d.is_zero()) return false;
    const auto& first = d.terms().begin()->first;
    for (const auto& [atom, exp] : first) {
        if (atom.kind != AtomKind::Inverse || exp != 1) continue;
        bool everywhere = true;
        for (const auto& [m, c] : d.terms()) {
            auto it = m.find(atom);
            if (it == m.end() || it->second != 1) {
                everywhere = false;
                break;
            }
        }
        if (!everywhere) continue;
        Monomial im;
        im[atom] = 1;
        Polynomial y = d.divide_monomial(im);
        if (!(y * Polynomial::atom(atom, 1) == d)) continue;
        Polynomial x = normal_form(atom.argument);
        if (!is_affine(x)) continue;
        if (!(y.monic() == x)) continue;
        AffineRow row = to_row(x);
        auto cit = row.coeffs.find(u);
        if (cit != row.coeffs.end() && !cit->second.is_zero()) return true;
    }
    return false;
}

inline TermPtr eliminate_sum_binder(const std::string& u, const TermPtr& body, EliminationReport& rep);

inline TermPtr solve_sum_alternative(const std::string& u, const std::vector<TermPtr>& atoms,
                                     EliminationReport& rep) {
    std::vector<TermPtr> free, bound;
    for (const auto& a : atoms)
        (free_data_variables(a).count(u) ? bound : free).push_back(a);
    if (bound.empty()) {
        rep.step("S1", "drop sum " + u);
        return tt::conj_all(atoms);
    }
    if (!free.empty()) rep.step("S3", "factor " + std::to_string(free.size()) + " conjunct(s) out of sum " + u);
    // affine test: substitute the solution everywhere and discharge the binder
    for (std::size_t i = 0; i < bound.size(); ++i) {
        if (bound[i]->kind != TKind::Test) continue;
        auto sol = solve_affine(normal_form(bound[i]->data), u);
        if (!sol) continue;
        if (rep.trace) rep.step("(1)", "sum " + u + ": " + u + " = " + to_string(*sol));
        std::vector<TermPtr> rest = free;
        for (std::size_t j = 0; j < bound.size(); ++j)
            if (j != i) rest.push_back(substitute_data(bound[j], u, *sol));
        return eliminate_rec(tt::conj_all(rest), rep);
    }
    // univariate test splitting into rational roots: one alternative per root
    for (std::size_t i = 0; i < bound.size(); ++i) {
        if (bound[i]->kind != TKind::Test) continue;
        Polynomial p = normal_form(bound[i]->data);
        if (!univariate_in(p, u) || univariate_degree(p, u) < 2) continue;
        auto roots = rational_roots(p, u);
        if (!roots) continue;
        if (rep.trace) {
            std::string rs;
            for (const auto& r : *roots) rs += (rs.empty() ? "" : ", ") + r.str();
            rep.step("C6", "sum " + u + ": roots " + rs);
        }
        std::vector<TermPtr> branches;
        for (const auto& r : *roots) {
            std::vector<TermPtr> rest = free;
            for (std::size_t j = 0; j < bound.size(); ++j)
                if (j != i) rest.push_back(substitute_data(bound[j], u, dt::constant(r)));
            branches.push_back(eliminate_rec(tt::conj_all(rest), rep));
        }
        return tt::choice_all(branches);
    }
    // a lone "u - p is nonzero" test exhausts to eps
    if (bound.size() == 1 && bound[0]->kind == TKind::Test &&
        matches_nonzero_affine_test(normal_form(bound[0]->data), u)) {
        rep.step("S6", "sum " + u + " over a nonzero test");
        return tt::conj_all(free);
    }
    rep.residual = true;
    if (rep.trace) rep.step("residual", "sum " + u + " kept");
    std::vector<TermPtr> parts = free;
    parts.push_back(tt::sum(u, tt::conj_all(bound)));
    return tt::conj_all(parts);
}

inline TermPtr eliminate_sum_binder(const std::string& u, const TermPtr& body, EliminationReport& rep) {
    auto alts = distribute_conj(body);
    if (alts.size() > 1) rep.step("S4", "sum " + u + " over choice");
    std::vector<TermPtr> results;
    results.reserve(alts.size());
    for (const auto& atoms : alts) results.push_back(solve_sum_alternative(u, atoms, rep));
    return tt::choice_all(results);
}

// --- encapsulation -------------------------------------------------------------

struct FlatAlternative {
    std::vector<std::string> binders;  // outermost first
    std::vector<TermPtr> atoms;
};

/// Choice-normal, prenex expansion: distributes choice, extrudes summation
/// binders to the front (renaming them fresh) and flattens conjunctions.
inline std::vector<FlatAlternative> flatten_prenex(const TermPtr& t, std::set<std::string>& avoid) {
    switch (t->kind) {
        case TKind::Null: return {};
        case TKind::Empty: return {FlatAlternative{}};
        case TKind::Choice: {
            auto out = flatten_prenex(t->left, avoid);
            auto r = flatten_prenex(t->right, avoid);
            out.insert(out.end(), r.begin(), r.end());
            return out;
        }
        case TKind::Conj: {
            auto ls = flatten_prenex(t->left, avoid);
            auto rs = flatten_prenex(t->right, avoid);
            std::vector<FlatAlternative> out;
            for (const auto& l : ls)
                for (const auto& r : rs) {
                    FlatAlternative m;
                    m.binders = l.binders;
                    m.binders.insert(m.binders.end(), r.binders.begin(), r.binders.end());
                    m.atoms = l.atoms;
                    m.atoms.insert(m.atoms.end(), r.atoms.begin(), r.atoms.end());
                    out.push_back(std::move(m));
                }
            return out;
        }
        case TKind::Sum: {
            std::string w = fresh_variable(avoid);
            avoid.insert(w);
            TermPtr body = substitute_data(t->left, t->name, dt::variable(w));
            auto out = flatten_prenex(body, avoid);
            for (auto& alt : out) alt.binders.insert(alt.binders.begin(), w);
            return out;
        }
        default: return {FlatAlternative{{}, {t}}};
    }
}

inline TermPtr encap_one(const Attribute& a, const TermPtr& t, EliminationReport& rep) {
    switch (t->kind) {
        case TKind::Empty: rep.step("E1", "encap over eps"); return t;
        case TKind::Null: rep.step("E2", "encap over delta"); return t;
        case TKind::Test: rep.step("E3", "encap over test"); return t;
        case TKind::Entry:
            if (t->attribute == a) {
                if (rep.trace) rep.step("E4", to_string(t) + " becomes a zero test");
                return tt::test(t->data);
            }
            return t;
        case TKind::Var: throw EncapOverTuplixVariableError();
        case TKind::Choice:
            rep.step("E6", "encap over +");
            return tt::choice(encap_one(a, t->left, rep), encap_one(a, t->right, rep));
        case TKind::Conj:
        case TKind::Sum: {
            if (!attribute_support(t).count(a)) return t;  // encapsulation of an a-free term is the term
            std::set<std::string> avoid = all_data_variables(t);
            auto alts = flatten_prenex(t, avoid);
            std::vector<TermPtr> results;
            for (const auto& alt : alts) {
                std::vector<TermPtr> others;
                DataTermPtr total;
                bool tuplix_var_seen = false;
                for (const auto& atom : alt.atoms) {
                    if (atom->kind == TKind::Entry && atom->attribute == a) {
                        total = total ? dt::add(total, atom->data) : atom->data;
                    } else {
                        if (atom->kind == TKind::Var) tuplix_var_seen = true;
                        others.push_back(atom);
                    }
                }
                if (total && tuplix_var_seen) throw EncapOverTuplixVariableError();
                TermPtr term;
                if (!total) {
                    term = tt::conj_all(others);
                    for (auto it = alt.binders.rbegin(); it != alt.binders.rend(); ++it)
                        term = tt::sum(*it, term);
                } else {
                    if (rep.trace) rep.step("T5/E4", a + "-entries total " + to_string(total));
                    others.push_back(tt::test(total));
                    term = tt::conj_all(others);
                    for (auto it = alt.binders.rbegin(); it != alt.binders.rend(); ++it)
                        term = eliminate_sum_binder(*it, term, rep);
                }
                results.push_back(term);
            }
            return tt::choice_all(results);
        }
        default: throw Error(std::string("encap over unexpected node: ") + kind_name(t->kind));
    }
}

inline TermPtr push_encap(const AttrSet& attrs, const TermPtr& t, EliminationReport& rep) {
    TermPtr acc = t;
    for (const auto& a : attrs) acc = encap_one(a, acc, rep);
    return acc;
}

// --- driver ---------------------------------------------------------------------

inline TermPtr eliminate_rec(const TermPtr& t, EliminationReport& rep) {
    switch (t->kind) {
        case TKind::Empty:
        case TKind::Null:
        case TKind::Entry:
        case TKind::Test:
        case TKind::Var:
            return t;
        case TKind::Conj:
            return tt::conj(eliminate_rec(t->left, rep), eliminate_rec(t->right, rep));
        case TKind::Choice:
            return tt::choice(eliminate_rec(t->left, rep), eliminate_rec(t->right, rep));
        case TKind::Sum:
            return eliminate_sum_binder(t->name, eliminate_rec(t->left, rep), rep);
        case TKind::Scalar:
            return push_scalar(t->data, eliminate_rec(t->left, rep), rep);
        case TKind::Clear:
            return push_clear(t->attributes, eliminate_rec(t->left, rep), rep);
        case TKind::Encap:
            return push_encap(t->attributes, eliminate_rec(t->left, rep), rep);
        case TKind::Ref:
        case TKind::Select:
            throw Error(std::string("unresolved node in elimination: ") + kind_name(t->kind));
    }
    throw Error("corrupt tuplix term");
}

}  // namespace detail

/// Full elimination pipeline. The result is in the choice fragment unless
/// `residual` is set, in which case undischarged summations remain.
inline EliminationReport eliminate_all(const TermPtr& t, bool trace = false) {
    EliminationReport rep;
    rep.trace = trace;
    rep.result = detail::eliminate_rec(t, rep);
    rep.residual = contains_kind(rep.result, TKind::Sum);
    return rep;
}

/// p * t with the scalar pushed to the leaves.
inline TermPtr eliminate_scalar(const DataTermPtr& p, const TermPtr& t) {
    EliminationReport rep;
    return detail::push_scalar(p, detail::eliminate_rec(t, rep), rep);
}

/// clear{attrs} t with the clearing pushed to the leaves.
inline TermPtr eliminate_clearing(const AttrSet& attrs, const TermPtr& t) {
    EliminationReport rep;
    return detail::push_clear(attrs, detail::eliminate_rec(t, rep), rep);
}

/// encap{attrs} t, eliminated one attribute at a time; summations solvable
/// after entry accumulation are discharged along the way.
inline TermPtr eliminate_encapsulation(const AttrSet& attrs, const TermPtr& t) {
    EliminationReport rep;
    return detail::push_encap(attrs, detail::eliminate_rec(t, rep), rep);
}

/// Summation elimination (innermost binders first).
inline EliminationReport eliminate_sums(const TermPtr& t, bool trace = false) {
    return eliminate_all(t, trace);
}

/// let u = p in t, expressed through summation: sum u . (t & test(u - p)).
/// The binder is renamed when u occurs in p itself.
inline TermPtr expand_let(const std::string& u, const DataTermPtr& p, const TermPtr& t) {
    if (variables(p).count(u)) {
        std::set<std::string> avoid = all_data_variables(t);
        for (const auto& v : variables(p)) avoid.insert(v);
        avoid.insert(u);
        std::string w = fresh_variable(avoid);
        TermPtr body = substitute_data(t, u, dt::variable(w));
        return tt::sum(w, tt::conj(body, tt::test(dt::sub(dt::variable(w), p))));
    }
    return tt::sum(u, tt::conj(t, tt::test(dt::sub(dt::variable(u), p))));
}

}  // namespace tuplix
