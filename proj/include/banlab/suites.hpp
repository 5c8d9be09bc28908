#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "banlab/serialize.hpp"

namespace banlab::suites {

inline constexpr const char* kToolVersion = "0.1.0";

/// Parsed scenario configuration. `raw` keeps the whole document so suites
/// can read their own knobs (search budgets, grids, instance overrides).
struct ScenarioConfig {
    std::string command;
    std::string suite;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    std::optional<double> tolerance;  // overrides every per-check default
    int parallelism = 1;
    int instances = 0;  // 0 means suite default
    serialize::json raw;

    /// Per-check tolerance, honoring a config-wide override.
    double tol(double fallback) const { return tolerance ? *tolerance : fallback; }
};

/// Builds a config from a parsed JSON document. Command may be overridden
/// by the CLI subcommand; flags are applied by the caller afterwards.
ScenarioConfig config_from_json(const serialize::json& doc, const std::string& command);

struct NamedEstimate {
    std::string name;
    summing::NormEstimate estimate;
};

struct RunReport {
    std::string command;
    std::string suite;
    std::uint64_t seed = 0;
    std::string config_digest;
    std::vector<std::pair<int, harness::CheckReport>> checks;  // (instance, report)
    std::vector<NamedEstimate> estimates;
    std::vector<serialize::json> counterexamples;
    std::string sweep_header;
    std::vector<std::string> sweep_rows;
    double wall_ms = 0.0;  // stdout only, never written to report files

    bool all_pass() const;
    int failures() const;
};

RunReport cmd_estimate_norm(const ScenarioConfig& config);
RunReport cmd_verify(const ScenarioConfig& config);
RunReport cmd_sweep(const ScenarioConfig& config);

/// Writes checks.jsonl, summary.csv, estimates.jsonl, report.json, and
/// counterexamples.jsonl (plus sweep.csv for sweeps) under out_dir.
/// All files are byte-stable for a fixed config and seed.
void write_outputs(const RunReport& report, const std::string& out_dir);

const std::vector<std::string>& suite_names();

} // namespace banlab::suites
