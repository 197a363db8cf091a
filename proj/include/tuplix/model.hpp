#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tuplix/eliminate.hpp"
#include "tuplix/normalize.hpp"
#include "tuplix/printer.hpp"

namespace tuplix {

// ---------------------------------------------------------------------------
// The standard model: closed terms denote finite sets of partial functions
// from attributes to quantities. An explicit binding a -> 0 is distinct from
// the absence of a binding.
// ---------------------------------------------------------------------------

using Alternative = std::map<Attribute, Quantity>;
using AlternativeSet = std::set<Alternative>;

/// Pointwise conjunctive composition: shared attributes add, one-sided
/// attributes carry over, absent stays absent.
inline Alternative alt_conj(const Alternative& f, const Alternative& g) {
    Alternative out = f;
    for (const auto& [a, v] : g) {
        auto it = out.find(a);
        if (it == out.end())
            out[a] = v;
        else
            it->second += v;
    }
    return out;
}

/// Structural evaluation of a summation-free, tuplix-closed term. The
/// auxiliary operators evaluate by their own model clauses, so eliminator
/// output can be cross-checked against unexpanded operator nodes.
inline AlternativeSet evaluate(const TermPtr& t, const Environment& env = {}) {
    switch (t->kind) {
        case TKind::Empty: return {Alternative{}};
        case TKind::Null: return {};
        case TKind::Entry: return {Alternative{{t->attribute, evaluate(t->data, env)}}};
        case TKind::Test:
            if (evaluate(t->data, env).is_zero()) return {Alternative{}};
            return {};
        case TKind::Conj: {
            AlternativeSet ls = evaluate(t->left, env);
            AlternativeSet rs = evaluate(t->right, env);
            AlternativeSet out;
            for (const auto& f : ls)
                for (const auto& g : rs) out.insert(alt_conj(f, g));
            return out;
        }
        case TKind::Choice: {
            AlternativeSet out = evaluate(t->left, env);
            AlternativeSet rs = evaluate(t->right, env);
            out.insert(rs.begin(), rs.end());
            return out;
        }
        case TKind::Scalar: {
            Quantity d = evaluate(t->data, env);
            AlternativeSet out;
            for (const auto& f : evaluate(t->left, env)) {
                Alternative g;
                for (const auto& [a, v] : f) g[a] = d * v;
                out.insert(std::move(g));
            }
            return out;
        }
        case TKind::Clear: {
            AlternativeSet out;
            for (const auto& f : evaluate(t->left, env)) {
                Alternative g;
                for (const auto& [a, v] : f)
                    if (!t->attributes.count(a)) g[a] = v;
                out.insert(std::move(g));
            }
            return out;
        }
        case TKind::Encap: {
            // keep alternatives neutral on every encapsulated attribute
            // (unbound or bound to zero), then clear those attributes
            AlternativeSet out;
            for (const auto& f : evaluate(t->left, env)) {
                bool neutral = true;
                for (const auto& a : t->attributes) {
                    auto it = f.find(a);
                    if (it != f.end() && !it->second.is_zero()) {
                        neutral = false;
                        break;
                    }
                }
                if (!neutral) continue;
                Alternative g;
                for (const auto& [a, v] : f)
                    if (!t->attributes.count(a)) g[a] = v;
                out.insert(std::move(g));
            }
            return out;
        }
        case TKind::Sum: throw UnsupportedSummationError();
        case TKind::Var: throw FreeTuplixVariableError(t->name);
        case TKind::Ref:
        case TKind::Select:
            throw Error(std::string("unresolved node in evaluation: ") + kind_name(t->kind));
    }
    throw Error("corrupt tuplix term");
}

// ---------------------------------------------------------------------------
// Semantic equivalence by evaluation. Open terms are compared on sampled
// environments only: a difference refutes, exhaustion stays Unknown. Equal is
// answered for closed terms alone.
// ---------------------------------------------------------------------------

struct SemVerdict {
    Verdict verdict;
    Environment witness;
    int samples_used = 0;
};

inline SemVerdict semantic_equal(const TermPtr& s, const TermPtr& t, int samples = 256,
                                 std::uint64_t seed = 1) {
    EliminationReport rs = eliminate_all(s);
    EliminationReport rt = eliminate_all(t);
    if (rs.residual || rt.residual) throw UnsupportedSummationError();
    std::set<std::string> varset = free_data_variables(rs.result);
    for (const auto& v : free_data_variables(rt.result)) varset.insert(v);
    if (varset.empty()) {
        bool eq = evaluate(rs.result) == evaluate(rt.result);
        return {eq ? Verdict::Equal : Verdict::NotEqual, {}, 1};
    }
    std::vector<std::string> vars(varset.begin(), varset.end());
    std::mt19937_64 rng(seed);
    for (int i = 0; i < samples; ++i) {
        Environment env = sampling::sample_environment(vars, static_cast<std::uint64_t>(i), rng);
        if (evaluate(rs.result, env) != evaluate(rt.result, env))
            return {Verdict::NotEqual, env, i + 1};
    }
    return {Verdict::Unknown, {}, samples};
}

// ---------------------------------------------------------------------------
// Deterministic random term generation.
// ---------------------------------------------------------------------------

struct GenOptions {
    int max_depth = 3;
    std::vector<Attribute> attributes = {"a", "b", "c"};
    std::vector<Quantity> constants = {Quantity(0), Quantity(1),     Quantity(-1),
                                       Quantity(2), Quantity(-2),    Quantity(1, 2)};
    std::vector<std::string> data_variables = {};  // empty: closed terms only
    bool allow_choice = true;
    bool allow_sum = false;
    bool allow_scalar = false;
    bool allow_clear = false;
    bool allow_encap = false;
    bool allow_tvar = false;
    bool allow_inverse = true;
    bool allow_absolute = true;
};

namespace detail {

inline std::size_t rnd(std::mt19937_64& rng, std::size_t n) { return n ? rng() % n : 0; }

inline DataTermPtr generate_data(const GenOptions& opt, std::mt19937_64& rng,
                                 const std::vector<std::string>& scope, int depth) {
    bool leaf = depth <= 0 || rnd(rng, 3) == 0;
    if (leaf) {
        if (!scope.empty() && rnd(rng, 2) == 0) return dt::variable(scope[rnd(rng, scope.size())]);
        return dt::constant(opt.constants[rnd(rng, opt.constants.size())]);
    }
    switch (rnd(rng, 6)) {
        case 0:
        case 1: return dt::add(generate_data(opt, rng, scope, depth - 1),
                               generate_data(opt, rng, scope, depth - 1));
        case 2:
        case 3: return dt::mul(generate_data(opt, rng, scope, depth - 1),
                               generate_data(opt, rng, scope, depth - 1));
        case 4: return dt::neg(generate_data(opt, rng, scope, depth - 1));
        default:
            if (opt.allow_inverse && rnd(rng, 2) == 0)
                return dt::inv(generate_data(opt, rng, scope, depth - 1));
            if (opt.allow_absolute)
                return dt::abs(generate_data(opt, rng, scope, depth - 1));
            return dt::neg(generate_data(opt, rng, scope, depth - 1));
    }
}

inline TermPtr generate_term_rec(const GenOptions& opt, std::mt19937_64& rng,
                                 std::vector<std::string> scope, int depth) {
    auto data = [&](int d) { return generate_data(opt, rng, scope, d); };
    if (depth <= 0) {
        switch (rnd(rng, 6)) {
            case 0: return tt::empty();
            case 1: return tt::null();
            case 2:
            case 3: return tt::entry(opt.attributes[rnd(rng, opt.attributes.size())], data(1));
            default: return tt::test(data(1));
        }
    }
    std::vector<int> ops = {0, 0};  // conj twice: the workhorse
    if (opt.allow_choice) ops.push_back(1);
    if (opt.allow_scalar) ops.push_back(2);
    if (opt.allow_clear) ops.push_back(3);
    if (opt.allow_encap) ops.push_back(4);
    if (opt.allow_sum) ops.push_back(5);
    if (opt.allow_tvar) ops.push_back(6);
    ops.push_back(7);  // drop to a leaf early now and then
    switch (ops[rnd(rng, ops.size())]) {
        case 0:
            return tt::conj(generate_term_rec(opt, rng, scope, depth - 1),
                            generate_term_rec(opt, rng, scope, depth - 1));
        case 1:
            return tt::choice(generate_term_rec(opt, rng, scope, depth - 1),
                              generate_term_rec(opt, rng, scope, depth - 1));
        case 2: return tt::scalar(data(1), generate_term_rec(opt, rng, scope, depth - 1));
        case 3: {
            AttrSet attrs;
            attrs.insert(opt.attributes[rnd(rng, opt.attributes.size())]);
            return tt::clear(attrs, generate_term_rec(opt, rng, scope, depth - 1));
        }
        case 4: {
            AttrSet attrs;
            attrs.insert(opt.attributes[rnd(rng, opt.attributes.size())]);
            return tt::encap(attrs, generate_term_rec(opt, rng, scope, depth - 1));
        }
        case 5: {
            std::string binder = "u" + std::to_string(scope.size() + 1);
            scope.push_back(binder);
            TermPtr body = generate_term_rec(opt, rng, scope, depth - 1);
            return tt::sum(binder, body);
        }
        case 6: return tt::tvar(rnd(rng, 2) ? "x" : "y");
        default: return generate_term_rec(opt, rng, scope, 0);
    }
}

}  // namespace detail

/// Deterministic pseudo-random term within the enabled fragment.
inline TermPtr generate_term(const GenOptions& opt, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return detail::generate_term_rec(opt, rng, opt.data_variables, opt.max_depth);
}

inline DataTermPtr generate_data_term(const GenOptions& opt, std::uint64_t seed, int depth = 2) {
    std::mt19937_64 rng(seed);
    return detail::generate_data(opt, rng, opt.data_variables, depth);
}

// ---------------------------------------------------------------------------
// Law selftest: every axiom of the calculus is instantiated with generated
// closed terms (respecting its side conditions) and both sides are compared
// in the model, exactly. Summation instances use bodies the eliminator can
// discharge; everything else evaluates directly.
// ---------------------------------------------------------------------------

struct LawResult {
    std::string name;
    int samples = 0;
    int failures = 0;
    std::string first_witness;
};

struct SelftestReport {
    std::vector<LawResult> laws;
    int total_failures() const {
        int n = 0;
        for (const auto& l : laws) n += l.failures;
        return n;
    }
};

namespace detail {

struct LawSpec {
    std::string name;
    std::function<std::pair<TermPtr, TermPtr>(std::mt19937_64&)> instance;
};

class LawTable {
public:
    LawTable() {
        GenOptions closed;
        closed.max_depth = 2;
        closed.allow_scalar = true;
        closed.allow_clear = true;
        closed.allow_encap = true;
        GenOptions plain;  // conj/choice/test/entry only
        plain.max_depth = 2;

        auto term = [closed](std::mt19937_64& rng) {
            return generate_term_rec(closed, rng, {}, closed.max_depth);
        };
        auto simple = [plain](std::mt19937_64& rng) {
            return generate_term_rec(plain, rng, {}, plain.max_depth);
        };
        auto value = [closed](std::mt19937_64& rng) { return generate_data(closed, rng, {}, 2); };
        auto attr = [closed](std::mt19937_64& rng) {
            return closed.attributes[rnd(rng, closed.attributes.size())];
        };
        auto attrset = [closed, attr](std::mt19937_64& rng) {
            AttrSet out;
            out.insert(attr(rng));
            if (rnd(rng, 2)) out.insert(attr(rng));
            return out;
        };
        auto pair = [](TermPtr l, TermPtr r) { return std::make_pair(std::move(l), std::move(r)); };

        add("T1", [=](auto& rng) {
            TermPtr x = term(rng), y = term(rng);
            return pair(tt::conj(x, y), tt::conj(y, x));
        });
        add("T2", [=](auto& rng) {
            TermPtr x = term(rng), y = term(rng), z = term(rng);
            return pair(tt::conj(tt::conj(x, y), z), tt::conj(x, tt::conj(y, z)));
        });
        add("T3", [=](auto& rng) {
            TermPtr x = term(rng);
            return pair(tt::conj(x, tt::empty()), x);
        });
        add("T4", [=](auto& rng) {
            TermPtr x = term(rng);
            return pair(tt::conj(x, tt::null()), tt::null());
        });
        add("T5", [=](auto& rng) {
            Attribute a = attr(rng);
            DataTermPtr u = value(rng), v = value(rng);
            return pair(tt::conj(tt::entry(a, u), tt::entry(a, v)), tt::entry(a, dt::add(u, v)));
        });
        add("T6", [=](auto& rng) {
            DataTermPtr u = value(rng);
            return pair(tt::test(u), tt::test(dt::div(u, u)));
        });
        add("T7", [=](auto&) { return pair(tt::test(dt::zero()), tt::empty()); });
        add("T8", [=](auto&) { return pair(tt::test(dt::one()), tt::null()); });
        add("T9", [=](auto& rng) {
            DataTermPtr u = value(rng), v = value(rng);
            return pair(tt::conj(tt::test(u), tt::test(v)),
                        tt::test(dt::add(dt::div(u, u), dt::div(v, v))));
        });
        add("T10", [=](auto& rng) {
            DataTermPtr u = value(rng);
            // make the test pass half of the time: v with the same value as u
            DataTermPtr v = rnd(rng, 2) ? value(rng) : dt::constant(evaluate(u, {}));
            Attribute a = attr(rng);
            TermPtr guard = tt::test(dt::sub(u, v));
            return pair(tt::conj(guard, tt::entry(a, u)), tt::conj(guard, tt::entry(a, v)));
        });

        add("C1", [=](auto& rng) {
            TermPtr x = term(rng), y = term(rng);
            return pair(tt::choice(x, y), tt::choice(y, x));
        });
        add("C2", [=](auto& rng) {
            TermPtr x = term(rng), y = term(rng), z = term(rng);
            return pair(tt::choice(tt::choice(x, y), z), tt::choice(x, tt::choice(y, z)));
        });
        add("C3", [=](auto& rng) {
            TermPtr x = term(rng);
            return pair(tt::choice(x, x), x);
        });
        add("C4", [=](auto& rng) {
            TermPtr x = term(rng);
            return pair(tt::choice(x, tt::null()), x);
        });
        add("C5", [=](auto& rng) {
            TermPtr x = term(rng), y = term(rng), z = term(rng);
            return pair(tt::conj(x, tt::choice(y, z)),
                        tt::choice(tt::conj(x, y), tt::conj(x, z)));
        });
        add("C6", [=](auto& rng) {
            DataTermPtr u = value(rng), v = value(rng);
            return pair(tt::choice(tt::test(u), tt::test(v)), tt::test(dt::mul(u, v)));
        });

        add("Sc1", [=](auto& rng) { return pair(tt::scalar(value(rng), tt::empty()), tt::empty()); });
        add("Sc2", [=](auto& rng) { return pair(tt::scalar(value(rng), tt::null()), tt::null()); });
        add("Sc3", [=](auto& rng) {
            DataTermPtr u = value(rng), v = value(rng);
            return pair(tt::scalar(u, tt::test(v)), tt::test(v));
        });
        add("Sc4", [=](auto& rng) {
            DataTermPtr u = value(rng), v = value(rng);
            Attribute a = attr(rng);
            return pair(tt::scalar(u, tt::entry(a, v)), tt::entry(a, dt::mul(u, v)));
        });
        add("Sc5", [=](auto& rng) {
            DataTermPtr u = value(rng);
            TermPtr x = term(rng), y = term(rng);
            return pair(tt::scalar(u, tt::conj(x, y)),
                        tt::conj(tt::scalar(u, x), tt::scalar(u, y)));
        });
        add("Sc6", [=](auto& rng) {
            DataTermPtr u = value(rng);
            TermPtr x = term(rng), y = term(rng);
            return pair(tt::scalar(u, tt::choice(x, y)),
                        tt::choice(tt::scalar(u, x), tt::scalar(u, y)));
        });
        add("Sc7", [=](auto& rng) {
            DataTermPtr p = value(rng);
            TermPtr body = solvable_body(rng, "v");
            return pair(tt::scalar(p, tt::sum("v", body)), tt::sum("v", tt::scalar(p, body)));
        });

        auto clear_laws = [&](const std::string& prefix) {
            add(prefix + "1", [=](auto& rng) { return pair(tt::clear(attrset(rng), tt::empty()), tt::empty()); });
            add(prefix + "2", [=](auto& rng) { return pair(tt::clear(attrset(rng), tt::null()), tt::null()); });
            add(prefix + "3", [=](auto& rng) {
                DataTermPtr u = value(rng);
                return pair(tt::clear(attrset(rng), tt::test(u)), tt::test(u));
            });
            add(prefix + "4", [=](auto& rng) {
                AttrSet attrs = attrset(rng);
                Attribute a = attr(rng);
                DataTermPtr u = value(rng);
                TermPtr rhs = attrs.count(a) ? tt::empty() : tt::entry(a, u);
                return pair(tt::clear(attrs, tt::entry(a, u)), rhs);
            });
            add(prefix + "5", [=](auto& rng) {
                AttrSet attrs = attrset(rng);
                TermPtr x = term(rng), y = term(rng);
                return pair(tt::clear(attrs, tt::conj(x, y)),
                            tt::conj(tt::clear(attrs, x), tt::clear(attrs, y)));
            });
            add(prefix + "6", [=](auto& rng) {
                AttrSet attrs = attrset(rng);
                TermPtr x = term(rng), y = term(rng);
                return pair(tt::clear(attrs, tt::choice(x, y)),
                            tt::choice(tt::clear(attrs, x), tt::clear(attrs, y)));
            });
            add(prefix + "7", [=](auto& rng) {
                AttrSet attrs = attrset(rng);
                TermPtr body = solvable_body(rng, "v");
                return pair(tt::clear(attrs, tt::sum("v", body)),
                            tt::sum("v", tt::clear(attrs, body)));
            });
        };
        clear_laws("Cl");

        add("E1", [=](auto& rng) { return pair(tt::encap(attrset(rng), tt::empty()), tt::empty()); });
        add("E2", [=](auto& rng) { return pair(tt::encap(attrset(rng), tt::null()), tt::null()); });
        add("E3", [=](auto& rng) {
            DataTermPtr u = value(rng);
            return pair(tt::encap(attrset(rng), tt::test(u)), tt::test(u));
        });
        add("E4", [=](auto& rng) {
            AttrSet attrs = attrset(rng);
            Attribute a = attr(rng);
            DataTermPtr u = value(rng);
            TermPtr rhs = attrs.count(a) ? tt::test(u) : tt::entry(a, u);
            return pair(tt::encap(attrs, tt::entry(a, u)), rhs);
        });
        add("E5", [=](auto& rng) {
            AttrSet attrs = attrset(rng);
            TermPtr x = simple(rng), y = simple(rng);
            return pair(tt::encap(attrs, tt::conj(x, tt::encap(attrs, y))),
                        tt::conj(tt::encap(attrs, x), tt::encap(attrs, y)));
        });
        add("E6", [=](auto& rng) {
            AttrSet attrs = attrset(rng);
            TermPtr x = simple(rng), y = simple(rng);
            return pair(tt::encap(attrs, tt::choice(x, y)),
                        tt::choice(tt::encap(attrs, x), tt::encap(attrs, y)));
        });
        add("E7", [=](auto& rng) {
            AttrSet attrs = attrset(rng);
            TermPtr body = solvable_body(rng, "v");
            return pair(tt::encap(attrs, tt::sum("v", body)),
                        tt::sum("v", tt::encap(attrs, body)));
        });

        add("S1", [=](auto& rng) {
            TermPtr x = term(rng);
            return pair(tt::sum("v", x), x);
        });
        add("S2", [=](auto& rng) {
            TermPtr body = solvable_body(rng, "v");
            return pair(tt::sum("v", body), tt::sum("w", substitute_data(body, "v", dt::variable("w"))));
        });
        add("S3", [=](auto& rng) {
            TermPtr s = simple(rng);
            TermPtr body = solvable_body(rng, "v");
            return pair(tt::sum("v", tt::conj(s, body)), tt::conj(s, tt::sum("v", body)));
        });
        add("S4", [=](auto& rng) {
            TermPtr s = solvable_body(rng, "v"), t2 = solvable_body(rng, "v");
            return pair(tt::sum("v", tt::choice(s, t2)),
                        tt::choice(tt::sum("v", s), tt::sum("v", t2)));
        });
        add("S5", [=](auto& rng) {
            DataTermPtr p = value(rng);
            return pair(tt::sum("v", tt::test(dt::sub(dt::variable("v"), p))), tt::empty());
        });
        add("S6", [=](auto& rng) {
            DataTermPtr p = value(rng);
            return pair(tt::sum("v", negate_test(dt::sub(dt::variable("v"), p))), tt::empty());
        });

        // zero-test logic identities
        add("Z1", [=](auto& rng) {
            DataTermPtr p = value(rng);
            return pair(tt::choice(tt::test(p), negate_test(p)), tt::empty());
        });
        add("Z2", [=](auto& rng) {
            DataTermPtr p = value(rng);
            return pair(tt::conj(tt::test(p), negate_test(p)), tt::null());
        });
        add("Z3", [=](auto& rng) {
            DataTermPtr p = value(rng);
            return pair(tt::choice(tt::test(p), tt::empty()), tt::empty());
        });
        add("Z4", [=](auto& rng) {
            DataTermPtr p = value(rng);
            return pair(tt::conj(tt::test(p), tt::null()), tt::null());
        });
    }

    const std::vector<LawSpec>& laws() const { return laws_; }

private:
    void add(std::string name, std::function<std::pair<TermPtr, TermPtr>(std::mt19937_64&)> f) {
        laws_.push_back({std::move(name), std::move(f)});
    }

    /// A summation body the eliminator can always discharge: a solvable test
    /// on the binder plus entries that mention it.
    static TermPtr solvable_body(std::mt19937_64& rng, const std::string& u) {
        GenOptions opt;
        auto value = [&] { return generate_data(opt, rng, {}, 1); };
        std::vector<Quantity> nz = {Quantity(1), Quantity(-1), Quantity(2), Quantity(1, 2), Quantity(3)};
        DataTermPtr uvar = dt::variable(u);
        TermPtr test;
        switch (rnd(rng, 3)) {
            case 0: {  // affine: c*u - p
                DataTermPtr c = dt::constant(nz[rnd(rng, nz.size())]);
                test = tt::test(dt::sub(dt::mul(c, uvar), value()));
                break;
            }
            case 1: {  // syntactic product of linear factors
                const auto& pool = sampling::pool();
                DataTermPtr r1 = dt::constant(pool[rnd(rng, pool.size())]);
                DataTermPtr r2 = dt::constant(pool[rnd(rng, pool.size())]);
                test = tt::test(dt::mul(dt::sub(uvar, r1), dt::sub(uvar, r2)));
                break;
            }
            default: test = tt::test(dt::sub(uvar, value())); break;
        }
        std::vector<TermPtr> parts;
        parts.push_back(tt::entry("a", dt::add(uvar, value())));
        if (rnd(rng, 2)) parts.push_back(tt::entry("b", dt::mul(uvar, dt::constant(nz[rnd(rng, nz.size())]))));
        if (rnd(rng, 2)) parts.push_back(tt::test(value()));
        parts.push_back(test);
        return tt::conj_all(parts);
    }

    std::vector<LawSpec> laws_;
};

}  // namespace detail

/// Checks every law of the calculus against the model on `samples` generated
/// instances each. A failure report carries the first offending instance.
inline SelftestReport run_selftest(int samples, std::uint64_t seed) {
    static const detail::LawTable table;
    SelftestReport report;
    for (std::size_t li = 0; li < table.laws().size(); ++li) {
        const auto& law = table.laws()[li];
        LawResult res;
        res.name = law.name;
        res.samples = samples;
        for (int i = 0; i < samples; ++i) {
            std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + li * 1000003ULL + static_cast<std::uint64_t>(i));
            auto [lhs, rhs] = law.instance(rng);
            bool ok = false;
            std::string note;
            try {
                EliminationReport el = eliminate_all(lhs);
                EliminationReport er = eliminate_all(rhs);
                if (el.residual || er.residual) {
                    note = "residual summation";
                } else {
                    ok = evaluate(el.result) == evaluate(er.result);
                    if (!ok) note = "model disagreement";
                }
            } catch (const Error& e) {
                note = e.what();
            }
            if (!ok) {
                ++res.failures;
                if (res.first_witness.empty())
                    res.first_witness = note + ": " + to_string(lhs) + "  vs  " + to_string(rhs);
            }
        }
        report.laws.push_back(std::move(res));
    }
    return report;
}

inline std::string to_text(const SelftestReport& report) {
    std::ostringstream out;
    std::size_t width = 4;
    for (const auto& l : report.laws) width = std::max(width, l.name.size());
    out << "law";
    for (std::size_t i = 3; i < width + 2; ++i) out << ' ';
    out << "samples  failures\n";
    for (const auto& l : report.laws) {
        out << l.name;
        for (std::size_t i = l.name.size(); i < width + 2; ++i) out << ' ';
        out << l.samples << "  " << l.failures;
        if (l.failures > 0) out << "  first: " << l.first_witness;
        out << "\n";
    }
    out << "total failures: " << report.total_failures() << "\n";
    return out.str();
}

}  // namespace tuplix
