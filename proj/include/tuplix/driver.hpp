#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tuplix/model.hpp"
#include "tuplix/parser.hpp"

namespace tuplix {

// ---------------------------------------------------------------------------
// Subcommand implementations behind the command line. Exit codes:
//   0  success (equal, for the equal subcommand)
//   1  not equal / selftest failures
//   2  usage, parse or unsupported-fragment errors
//   3  unknown verdicts and residual summations
// ---------------------------------------------------------------------------

inline constexpr int kExitOk = 0;
inline constexpr int kExitNotEqual = 1;
inline constexpr int kExitError = 2;
inline constexpr int kExitUnknown = 3;

struct CommandResult {
    int code = kExitOk;
    std::string output;  // newline-terminated
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline nlohmann::json alternative_json(const Alternative& alt) {
    nlohmann::json entries = nlohmann::json::object();
    for (const auto& [a, v] : alt) entries[a] = v.str();
    return nlohmann::json{{"entries", entries}};
}

inline nlohmann::json canonical_json(const CanonicalForm& form) {
    nlohmann::json alts = nlohmann::json::array();
    for (const auto& alt : form.alternatives) {
        nlohmann::json entries = nlohmann::json::object();
        for (const auto& [a, p] : alt.entries) entries[a] = to_string(p.embed());
        nlohmann::json j{{"test", to_string(alt.combined_test())}, {"entries", entries}};
        if (!alt.variables.empty()) j["tvars"] = alt.variables;
        alts.push_back(std::move(j));
    }
    return nlohmann::json{{"alternatives", alts}};
}

inline std::string trace_text(const EliminationReport& rep) {
    std::string out;
    for (const auto& s : rep.steps) {
        out += "# ";
        out += s.rule;
        out += ": ";
        out += s.detail;
        out += "\n";
    }
    return out;
}

}  // namespace detail

inline CommandResult cmd_normalize(const std::string& path, const std::string& def,
                                   const std::string& format = "text", bool trace = false) {
    try {
        SourceFile file = parse_file(detail::read_file(path));
        TermPtr term = file.resolve(def);
        EliminationReport rep = eliminate_all(term, trace);
        std::string out = trace ? detail::trace_text(rep) : "";
        if (rep.residual) {
            out += "residual summation; partial result:\n";
            out += to_string(rep.result);
            out += "\n";
            return {kExitUnknown, out};
        }
        CanonicalForm form = canonicalize(rep.result);
        if (format == "json")
            out += detail::canonical_json(form).dump(2) + "\n";
        else
            out += to_string(form) + "\n";
        return {kExitOk, out};
    } catch (const Error& e) {
        return {kExitError, std::string("error: ") + e.what() + "\n"};
    }
}

inline CommandResult cmd_eval(const std::string& path, const std::string& def,
                              const std::vector<std::string>& bindings) {
    try {
        Environment env;
        for (const auto& b : bindings) {
            auto eq = b.find('=');
            if (eq == std::string::npos) throw Error("malformed binding (want var=value): " + b);
            env[b.substr(0, eq)] = Quantity::from_string(b.substr(eq + 1));
        }
        SourceFile file = parse_file(detail::read_file(path));
        TermPtr term = file.resolve(def);
        EliminationReport rep = eliminate_all(term);
        if (rep.residual)
            return {kExitUnknown, "residual summation; cannot evaluate\n"};
        AlternativeSet sem = evaluate(rep.result, env);
        nlohmann::json alts = nlohmann::json::array();
        for (const auto& alt : sem) alts.push_back(detail::alternative_json(alt));
        return {kExitOk, nlohmann::json{{"alternatives", alts}}.dump(2) + "\n"};
    } catch (const Error& e) {
        return {kExitError, std::string("error: ") + e.what() + "\n"};
    }
}

inline CommandResult cmd_equal(const std::string& path, const std::string& def_a,
                               const std::string& def_b, int samples = 256, std::uint64_t seed = 1) {
    try {
        SourceFile file = parse_file(detail::read_file(path));
        TermPtr a = file.resolve(def_a);
        TermPtr b = file.resolve(def_b);
        EliminationReport ra = eliminate_all(a);
        EliminationReport rb = eliminate_all(b);
        if (ra.residual || rb.residual)
            return {kExitUnknown, "residual summation; cannot compare\n"};
        CanonicalForm ca = canonicalize(ra.result);
        CanonicalForm cb = canonicalize(rb.result);
        if (ca == cb) return {kExitOk, "Equal\n"};
        bool closed_a = free_data_variables(ra.result).empty() && tuplix_closed(ra.result);
        bool closed_b = free_data_variables(rb.result).empty() && tuplix_closed(rb.result);
        if (closed_a && closed_b) return {kExitNotEqual, "NotEqual\n"};
        // open terms: compare sampled closed instantiations
        AttrSet support = attribute_support(ra.result);
        for (const auto& at : attribute_support(rb.result)) support.insert(at);
        TermPtr ia = detail::instantiate_tuplix_vars(ra.result, support);
        TermPtr ib = detail::instantiate_tuplix_vars(rb.result, support);
        std::set<std::string> varset = free_data_variables(ia);
        for (const auto& v : free_data_variables(ib)) varset.insert(v);
        std::vector<std::string> vars(varset.begin(), varset.end());
        std::mt19937_64 rng(seed);
        for (int i = 0; i < samples; ++i) {
            Environment env = sampling::sample_environment(vars, static_cast<std::uint64_t>(i), rng);
            if (evaluate(ia, env) != evaluate(ib, env)) {
                std::string out = "NotEqual under";
                for (const auto& [v, q] : env) out += " " + v + "=" + q.str();
                return {kExitNotEqual, out + "\n"};
            }
        }
        return {kExitUnknown, "Unknown (passed " + std::to_string(samples) + " samples)\n"};
    } catch (const Error& e) {
        return {kExitError, std::string("error: ") + e.what() + "\n"};
    }
}

inline CommandResult cmd_selftest(int samples = 500, std::uint64_t seed = 1,
                                  const std::string& format = "text") {
    try {
        SelftestReport report = run_selftest(samples, seed);
        std::string out;
        if (format == "json") {
            nlohmann::json laws = nlohmann::json::array();
            for (const auto& l : report.laws)
                laws.push_back({{"name", l.name},
                                {"samples", l.samples},
                                {"failures", l.failures},
                                {"first_witness", l.first_witness}});
            out = nlohmann::json{{"laws", laws}, {"total_failures", report.total_failures()}}.dump(2) +
                  "\n";
        } else {
            out = to_text(report);
        }
        return {report.total_failures() == 0 ? kExitOk : kExitNotEqual, out};
    } catch (const Error& e) {
        return {kExitError, std::string("error: ") + e.what() + "\n"};
    }
}

}  // namespace tuplix
