#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tuplix/driver.hpp"

int main(int argc, char** argv) {
    CLI::App app{"tuplix — a symbolic engine for tuplix calculus over exact rationals"};
    app.require_subcommand(1);

    std::string file, def, def_a, def_b, format = "text";
    std::vector<std::string> defs, bindings;
    bool trace = false;
    int samples = 256;
    int selftest_samples = 500;
    std::uint64_t seed = 1;

    auto* normalize = app.add_subcommand("normalize", "eliminate derived operators and print the canonical form");
    normalize->add_option("file", file, "source file")->required();
    normalize->add_option("--def", def, "definition to normalize")->required();
    normalize->add_flag("--trace", trace, "print the elimination steps");
    normalize->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

    auto* eval = app.add_subcommand("eval", "evaluate a definition to its set of alternatives (JSON)");
    eval->add_option("file", file, "source file")->required();
    eval->add_option("--def", def, "definition to evaluate")->required();
    eval->add_option("--bind", bindings, "data variable binding var=value (repeatable)");

    auto* equal = app.add_subcommand("equal", "decide equality of two definitions");
    equal->add_option("file", file, "source file")->required();
    equal->add_option("--def", defs, "the two definitions to compare")->expected(2)->required();
    equal->add_option("--samples", samples, "sample budget for open terms");
    equal->add_option("--seed", seed, "random seed");

    auto* selftest = app.add_subcommand("selftest", "check every law of the calculus against the model");
    selftest->add_option("--samples", selftest_samples, "instances per law");
    selftest->add_option("--seed", seed, "random seed");
    selftest->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

    CLI11_PARSE(app, argc, argv);

    tuplix::CommandResult result;
    if (normalize->parsed()) {
        result = tuplix::cmd_normalize(file, def, format, trace);
    } else if (eval->parsed()) {
        result = tuplix::cmd_eval(file, def, bindings);
    } else if (equal->parsed()) {
        result = tuplix::cmd_equal(file, defs[0], defs[1], samples, seed);
    } else if (selftest->parsed()) {
        result = tuplix::cmd_selftest(selftest_samples, seed, format);
    }
    std::cout << result.output;
    return result.code;
}
