#include <chrono>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "banlab/suites.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;

struct CommonFlags {
    std::string config_path;
    std::string suite;
    std::string out_dir;
    long long seed = -1;
    double tolerance = -1.0;
    bool has_seed = false;
    bool has_tolerance = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_suite) {
    cmd->add_option("--config", flags.config_path, "Path to the JSON scenario config")
        ->required();
    if (with_suite)
        cmd->add_option("--suite", flags.suite,
                        "Suite name: lemma_le, leinc, sandwich, prinint, q11, jp, hilbert");
    cmd->add_option("--seed", flags.seed, "Seed override")->each([&flags](const std::string&) {
        flags.has_seed = true;
    });
    cmd->add_option("--out", flags.out_dir, "Output directory override");
    cmd->add_option("--tolerance", flags.tolerance, "Tolerance override for every check")
        ->each([&flags](const std::string&) { flags.has_tolerance = true; });
}

int run_command(const std::string& command, const CommonFlags& flags) {
    using banlab::suites::RunReport;
    using banlab::suites::ScenarioConfig;

    banlab::serialize::json doc = banlab::serialize::parse_json_file(flags.config_path);
    if (!doc.is_object()) throw banlab::ConfigError("config root: expected an object");
    if (flags.has_seed) doc["seed"] = static_cast<std::uint64_t>(flags.seed);
    if (flags.has_tolerance) doc["tolerance"] = flags.tolerance;
    if (!flags.suite.empty()) doc["suite"] = flags.suite;
    if (!flags.out_dir.empty()) doc["out"] = flags.out_dir;

    ScenarioConfig cfg = banlab::suites::config_from_json(doc, command);

    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    if (command == "estimate-norm")
        rep = banlab::suites::cmd_estimate_norm(cfg);
    else if (command == "verify")
        rep = banlab::suites::cmd_verify(cfg);
    else
        rep = banlab::suites::cmd_sweep(cfg);
    const auto t1 = std::chrono::steady_clock::now();
    rep.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    banlab::suites::write_outputs(rep, cfg.out_dir);

    std::printf("%s%s%s: %zu checks, %d failures, %zu estimates (%.1f ms) -> %s\n",
                command.c_str(), rep.suite.empty() ? "" : " ", rep.suite.c_str(),
                rep.checks.size(), rep.failures(), rep.estimates.size(), rep.wall_ms,
                cfg.out_dir.c_str());
    return rep.all_pass() ? kExitPass : kExitCheckFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for summing-operator norms and "
                 "vector-valued function norms on finite-dimensional spaces"};
    app.require_subcommand(1);

    CommonFlags estimate_flags, verify_flags, sweep_flags;
    CLI::App* estimate = app.add_subcommand("estimate-norm", "Estimate an operator ideal norm");
    add_common(estimate, estimate_flags, false);
    CLI::App* verify = app.add_subcommand("verify", "Run a verification suite");
    add_common(verify, verify_flags, true);
    CLI::App* sweep = app.add_subcommand("sweep", "Tabulate norms over a sigma grid");
    add_common(sweep, sweep_flags, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Usage problems are config errors; --help stays a clean exit.
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }

    try {
        if (estimate->parsed()) return run_command("estimate-norm", estimate_flags);
        if (verify->parsed()) return run_command("verify", verify_flags);
        return run_command("sweep", sweep_flags);
    } catch (const banlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const banlab::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}
