#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "funcint/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"funcint: functional-integration experiment runner"};
    app.require_subcommand(0, 1);

    std::string config_path;
    std::string out_dir = "funcint_out";
    int workers = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool print_defaults = false;

    app.add_option("--config", config_path, "configuration file (key = value sections)");
    app.add_option("--out", out_dir, "output directory for CSV and manifest files");
    app.add_option("--workers", workers, "worker threads (must not change results)");
    app.add_option("--seed", seed, "seed override")->each([&](const std::string&) {
        seed_given = true;
    });
    app.add_flag("--print-default-config", print_defaults,
                 "print the subcommand's default configuration and exit");

    for (const std::string& name : funcint::subcommand_names()) {
        app.add_subcommand(name, "run the " + name + " experiment");
    }

    CLI11_PARSE(app, argc, argv);

    const auto subcommands = app.get_subcommands();
    if (subcommands.empty()) {
        std::fprintf(stderr, "usage: funcint <subcommand> [--config FILE] [--out DIR]\n");
        std::fprintf(stderr, "subcommands:");
        for (const std::string& name : funcint::subcommand_names()) {
            std::fprintf(stderr, " %s", name.c_str());
        }
        std::fprintf(stderr, "\n");
        return 2;
    }
    const std::string subcommand = subcommands.front()->get_name();

    if (print_defaults) {
        std::fputs(funcint::default_config_text(subcommand).c_str(), stdout);
        return 0;
    }

    funcint::RunOptions options;
    options.subcommand = subcommand;
    options.config_path = config_path;
    options.out_dir = out_dir;
    options.workers = workers;
    if (seed_given) {
        options.seed = seed;
    }

    const funcint::RunResult result = funcint::run(options);
    if (!result.error.empty()) {
        std::fprintf(stderr, "funcint %s: %s\n", subcommand.c_str(), result.error.c_str());
    }
    for (const funcint::CheckResult& check : result.checks) {
        std::printf("[%s] %s: value %.6g against %.6g\n", check.pass ? "PASS" : "FAIL",
                    check.name.c_str(), check.value, check.tolerance);
    }
    if (!result.manifest_path.empty()) {
        std::printf("manifest: %s\n", result.manifest_path.c_str());
    }
    return result.exit_code;
}
