#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "banlab/suites.hpp"

using namespace banlab;
using serialize::json;
using suites::RunReport;
using suites::ScenarioConfig;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("banlab_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(BANLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

json base_verify_config(const std::string& suite, int instances) {
    json doc;
    doc["seed"] = 42;
    doc["suite"] = suite;
    doc["instances"] = instances;
    doc["search"] = {{"multistarts", 4}, {"max_iters", 400}, {"restarts", 24}};
    doc["jp"] = {{"batch", 5}};
    return doc;
}

} // namespace

TEST_CASE("config_from_json: field validation") {
    CHECK_THROWS_AS(suites::config_from_json(json::parse("[]"), "verify"), ConfigError);
    CHECK_THROWS_AS(suites::config_from_json(json::parse("{}"), "verify"), ConfigError);

    json doc;
    doc["seed"] = 7;
    doc["parallelism"] = 0;
    CHECK_THROWS_AS(suites::config_from_json(doc, "verify"), ConfigError);
    doc["parallelism"] = 2;
    doc["tolerance"] = "high";
    CHECK_THROWS_AS(suites::config_from_json(doc, "verify"), ConfigError);
    doc["tolerance"] = 1e-9;
    const ScenarioConfig cfg = suites::config_from_json(doc, "verify");
    CHECK(cfg.seed == 7);
    CHECK(cfg.parallelism == 2);
    CHECK(cfg.tolerance == 1e-9);
    CHECK(cfg.tol(1e-12) == 1e-9);
}

TEST_CASE("serialize: space, operator, and function round-trips") {
    SpaceSpec s(3, kInfExponent, {0.5, 1.0, 2.0});
    const json js = serialize::space_to_json(s);
    CHECK(js["exponent"] == "inf");
    CHECK(serialize::space_from_json(js, "t") == s);

    CHECK_THROWS_AS(serialize::space_from_json(json::parse("{\"dim\":2}"), "t"), ConfigError);
    CHECK_THROWS_AS(
        serialize::space_from_json(json::parse("{\"dim\":0,\"exponent\":2}"), "t"), ConfigError);
    CHECK_THROWS_AS(
        serialize::space_from_json(json::parse("{\"dim\":2,\"exponent\":0.5}"), "t"),
        ConfigError);

    summing::Operator T = summing::Operator::diagonal(SpaceSpec(2, 2.0), {1.5, -2.0});
    const json jt = serialize::operator_to_json(T);
    const summing::Operator back = serialize::operator_from_json(jt, "t");
    CHECK(back.matrix == T.matrix);
    CHECK(back.domain == T.domain);

    json bad = jt;
    bad["matrix"] = json::array({json::array({1.0})});
    CHECK_THROWS_AS(serialize::operator_from_json(bad, "t"), ConfigError);

    vfun::MeasureSpace ms;
    ms.masses = {0.25, 0.75};
    vfun::SimpleFunction f;
    f.space = SpaceSpec(2, 1.0);
    f.values = {Vector({1.0, 2.0}), Vector({0.0, -1.0})};
    const json jf = serialize::function_to_json(ms, f);
    auto [ms2, f2] = serialize::function_from_json(jf, "t");
    CHECK(ms2.masses == ms.masses);
    CHECK(f2.values == f.values);
    CHECK(f2.space == f.space);
}

TEST_CASE("format_double: 17 significant digits round-trip") {
    for (double v : {1.0, -0.1, 3.141592653589793, 1e-300, 123456789.123456789}) {
        const std::string s = serialize::format_double(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("cmd_estimate_norm: oracle value lands in the report") {
    json doc;
    doc["seed"] = 1;
    doc["operator"] =
        serialize::operator_to_json(summing::Operator::identity(SpaceSpec(3, 2.0)));
    doc["params"] = {{"kind", "p_summing"}, {"p", 2.0}};
    doc["search"] = {{"restarts", 16}};
    const RunReport rep =
        suites::cmd_estimate_norm(suites::config_from_json(doc, "estimate-norm"));
    REQUIRE(rep.estimates.size() == 1);
    CHECK(rep.estimates[0].estimate.value == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(rep.estimates[0].estimate.certification == summing::Certification::exact);
    CHECK(rep.all_pass());

    doc["params"] = {{"kind", "p_sigma"}, {"p", 1.0}, {"sigma", 1.0}};
    CHECK_THROWS_AS(suites::cmd_estimate_norm(suites::config_from_json(doc, "estimate-norm")),
                    ConfigError);

    doc["params"] = {{"kind", "p_summing"}, {"p", 1.0}};
    doc["operator"] = serialize::operator_to_json(
        summing::Operator::zero(SpaceSpec(2, 2.0), SpaceSpec(2, 2.0)));
    const RunReport zero =
        suites::cmd_estimate_norm(suites::config_from_json(doc, "estimate-norm"));
    CHECK(zero.estimates[0].estimate.value == 0.0);
}

TEST_CASE("cmd_verify: every suite passes on a small run") {
    for (const std::string& suite : suites::suite_names()) {
        json doc = base_verify_config(suite, suite == "jp" ? 2 : 24);
        const RunReport rep = suites::cmd_verify(suites::config_from_json(doc, "verify"));
        INFO("suite ", suite);
        CHECK(rep.all_pass());
        CHECK(!rep.checks.empty());
        CHECK(rep.counterexamples.empty());
    }
    json doc = base_verify_config("nope", 4);
    CHECK_THROWS_AS(suites::cmd_verify(suites::config_from_json(doc, "verify")), ConfigError);
}

TEST_CASE("cmd_verify: deterministic bytes across runs and parallelism") {
    for (const std::string& suite : {std::string("lemma_le"), std::string("hilbert")}) {
        json doc = base_verify_config(suite, 12);
        const auto d1 = temp_dir(suite + "_a");
        const auto d2 = temp_dir(suite + "_b");
        const auto d3 = temp_dir(suite + "_c");

        suites::write_outputs(suites::cmd_verify(suites::config_from_json(doc, "verify")),
                              d1.string());
        suites::write_outputs(suites::cmd_verify(suites::config_from_json(doc, "verify")),
                              d2.string());
        doc["parallelism"] = 3;
        suites::write_outputs(suites::cmd_verify(suites::config_from_json(doc, "verify")),
                              d3.string());

        for (const char* file : {"checks.jsonl", "summary.csv", "estimates.jsonl", "report.json"}) {
            CHECK(slurp(d1 / file) == slurp(d2 / file));
            CHECK(slurp(d1 / file) == slurp(d3 / file));
            INFO(suite, " ", file);
        }
        CHECK(!slurp(d1 / "checks.jsonl").empty());
    }
}

TEST_CASE("cmd_verify: forced failures replay from the counterexample config") {
    json doc = base_verify_config("leinc", 6);
    doc["tolerance"] = -1e3;  // impossible bar: every inequality check fails
    const RunReport rep = suites::cmd_verify(suites::config_from_json(doc, "verify"));
    CHECK(!rep.all_pass());
    REQUIRE(!rep.counterexamples.empty());

    const json replay_doc = rep.counterexamples[0];
    const RunReport replay = suites::cmd_verify(suites::config_from_json(replay_doc, "verify"));
    CHECK(!replay.all_pass());
    // The replayed instance reproduces the original reports bit for bit.
    REQUIRE(replay.checks.size() >= 1);
    const auto& first_orig = rep.checks[0].second;
    const auto& first_replay = replay.checks[0].second;
    CHECK(first_orig.lhs == first_replay.lhs);
    CHECK(first_orig.rhs == first_replay.rhs);
    CHECK(first_orig.margin == first_replay.margin);
}

TEST_CASE("cmd_sweep: constant function gives a flat column") {
    json doc;
    doc["seed"] = 5;
    json fn;
    fn["space"] = {{"dim", 2}, {"exponent", 2.0}};
    fn["cells"] = json::array({json{{"mass", 0.5}, {"value", {3.0, 4.0}}},
                               json{{"mass", 0.5}, {"value", {3.0, 4.0}}}});
    doc["function"] = fn;
    doc["p"] = 1.0;
    doc["sigma_grid"] = {0.0, 0.5, 0.9};
    const RunReport rep = suites::cmd_sweep(suites::config_from_json(doc, "sweep"));
    CHECK(rep.all_pass());
    REQUIRE(rep.sweep_rows.size() == 3);
    for (const std::string& row : rep.sweep_rows) {
        const double phi = std::stod(row.substr(row.find(',') + 1));
        CHECK(phi == doctest::Approx(5.0).epsilon(1e-9));
    }

    doc["sigma_grid"] = json::array();
    CHECK_THROWS_AS(suites::cmd_sweep(suites::config_from_json(doc, "sweep")), ConfigError);
    doc["sigma_grid"] = {0.5, 0.0};
    CHECK_THROWS_AS(suites::cmd_sweep(suites::config_from_json(doc, "sweep")), ConfigError);
    doc["sigma_grid"] = {0.0, 1.0};
    CHECK_THROWS_AS(suites::cmd_sweep(suites::config_from_json(doc, "sweep")), ConfigError);
}

TEST_CASE("cli binary: exit codes") {
    const auto dir = temp_dir("cli");

    json ok = base_verify_config("leinc", 4);
    std::ofstream(dir / "ok.json") << ok.dump();
    CHECK(run_cli("verify --config " + (dir / "ok.json").string() + " --out " +
                  (dir / "out1").string()) == 0);

    // Failing checks exit with 1.
    json fail = ok;
    fail["tolerance"] = -1e3;
    std::ofstream(dir / "fail.json") << fail.dump();
    CHECK(run_cli("verify --config " + (dir / "fail.json").string() + " --out " +
                  (dir / "out2").string()) == 1);

    // Malformed configs exit with 2.
    std::ofstream(dir / "bad.json") << "{ not json";
    CHECK(run_cli("verify --config " + (dir / "bad.json").string()) == 2);
    CHECK(run_cli("verify --config " + (dir / "missing.json").string()) == 2);

    json badsigma;
    badsigma["seed"] = 1;
    badsigma["operator"] =
        serialize::operator_to_json(summing::Operator::identity(SpaceSpec(2, 2.0)));
    badsigma["params"] = {{"kind", "p_sigma"}, {"p", 1.0}, {"sigma", 1.0}};
    std::ofstream(dir / "badsigma.json") << badsigma.dump();
    CHECK(run_cli("estimate-norm --config " + (dir / "badsigma.json").string()) == 2);

    // estimate-norm writes its report and exits 0.
    json est;
    est["seed"] = 2;
    est["operator"] =
        serialize::operator_to_json(summing::Operator::identity(SpaceSpec(3, 2.0)));
    est["params"] = {{"kind", "p_summing"}, {"p", 2.0}};
    std::ofstream(dir / "est.json") << est.dump();
    CHECK(run_cli("estimate-norm --config " + (dir / "est.json").string() + " --out " +
                  (dir / "out3").string()) == 0);
    CHECK(slurp(dir / "out3" / "estimates.jsonl").find("hilbert_schmidt") != std::string::npos);

    // Suite override via the flag.
    json nosuite;
    nosuite["seed"] = 3;
    nosuite["instances"] = 4;
    nosuite["search"] = {{"multistarts", 4}, {"restarts", 8}};
    std::ofstream(dir / "nosuite.json") << nosuite.dump();
    CHECK(run_cli("verify --suite sandwich --config " + (dir / "nosuite.json").string() +
                  " --out " + (dir / "out4").string()) == 0);
}
