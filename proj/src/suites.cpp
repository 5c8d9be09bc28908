#include "banlab/suites.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <stdexcept>

#include "banlab/digest.hpp"
#include "banlab/rng.hpp"

namespace banlab::suites {

using harness::CheckConfig;
using harness::CheckReport;
using serialize::json;
using summing::Operator;
using summing::VectorFamily;
using vfun::MeasureSpace;
using vfun::SimpleFunction;

namespace {

// ---------------------------------------------------------------------------
// config plumbing
// ---------------------------------------------------------------------------

spaces::SearchConfig engine_config(const ScenarioConfig& cfg, std::uint64_t seed) {
    spaces::SearchConfig e;
    e.seed = seed;
    e.multistarts = 8;
    e.max_iters = 2000;
    if (cfg.raw.contains("search")) {
        const json& s = cfg.raw["search"];
        e.multistarts = s.value("multistarts", e.multistarts);
        e.max_iters = s.value("max_iters", e.max_iters);
        e.enum_cap = s.value("enum_cap", e.enum_cap);
    }
    return e;
}

summing::FamilySearchConfig family_config(const ScenarioConfig& cfg, std::uint64_t seed) {
    summing::FamilySearchConfig f;
    f.seed = seed;
    if (cfg.raw.contains("search")) {
        const json& s = cfg.raw["search"];
        f.restarts = s.value("restarts", f.restarts);
        f.max_family = s.value("max_family", f.max_family);
        f.ascent_sweeps = s.value("ascent_sweeps", f.ascent_sweeps);
        f.use_oracles = s.value("use_oracles", f.use_oracles);
    }
    f.dual_ball = engine_config(cfg, seed);
    return f;
}

CheckConfig check_config(const ScenarioConfig& cfg, std::uint64_t seed, double fallback_tol) {
    CheckConfig c;
    c.seed = seed;
    c.tolerance = cfg.tol(fallback_tol);
    c.engine = engine_config(cfg, seed);
    return c;
}

// ---------------------------------------------------------------------------
// random instance building blocks
// ---------------------------------------------------------------------------

SpaceSpec random_space(rng::Stream& s, bool polytope_only, int max_dim) {
    const int dim = 2 + static_cast<int>(s.below(static_cast<std::uint64_t>(max_dim - 1)));
    const int pick = static_cast<int>(s.below(polytope_only ? 2 : 3));
    double exponent = 1.0;
    if (polytope_only)
        exponent = pick == 0 ? 1.0 : kInfExponent;
    else
        exponent = pick == 0 ? 1.0 : (pick == 1 ? 2.0 : kInfExponent);
    return SpaceSpec(dim, exponent);
}

json vector_json(const Vector& v) { return json(v.coords); }

Vector vector_from_json(const json& j, const std::string& field) {
    if (!j.is_array()) throw ConfigError("config field '" + field + "': expected an array");
    Vector v;
    for (const json& c : j) {
        if (!c.is_number()) throw ConfigError("config field '" + field + "': expected numbers");
        v.coords.push_back(c.get<double>());
    }
    return v;
}

json family_json(const std::vector<Vector>& vectors) {
    json arr = json::array();
    for (const Vector& v : vectors) arr.push_back(vector_json(v));
    return arr;
}

std::vector<Vector> family_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty())
        throw ConfigError("config field '" + field + "': expected a nonempty array");
    std::vector<Vector> out;
    for (const json& v : j) out.push_back(vector_from_json(v, field));
    return out;
}

std::vector<Vector> random_family(rng::Stream& s, int dim, int max_size) {
    const int size = 1 + static_cast<int>(s.below(static_cast<std::uint64_t>(max_size)));
    std::vector<Vector> out;
    for (int i = 0; i < size; ++i) {
        Vector v = Vector::zero(dim);
        for (int j = 0; j < dim; ++j) v[j] = s.normal();
        out.push_back(std::move(v));
    }
    return out;
}

std::pair<MeasureSpace, SimpleFunction> random_function(rng::Stream& s, const SpaceSpec& space,
                                                        int max_cells) {
    const int cells = 1 + static_cast<int>(s.below(static_cast<std::uint64_t>(max_cells)));
    MeasureSpace ms;
    SimpleFunction f;
    f.space = space;
    for (int c = 0; c < cells; ++c) {
        ms.masses.push_back(s.uniform(0.1, 1.1));
        Vector v = Vector::zero(space.dim);
        for (int j = 0; j < space.dim; ++j) v[j] = s.normal();
        f.values.push_back(std::move(v));
    }
    return {std::move(ms), std::move(f)};
}

std::uint64_t instance_seed(const json& inst) {
    if (!inst.contains("seed") || !inst["seed"].is_number())
        throw ConfigError("config field 'instances[].seed': missing or not a number");
    return inst["seed"].get<std::uint64_t>();
}

// ---------------------------------------------------------------------------
// suites
// ---------------------------------------------------------------------------

struct InstanceResult {
    std::vector<CheckReport> checks;
    std::vector<NamedEstimate> estimates;
};

// --- lemma_le: pointwise weak/mixed/base chain on random families ---------

json gen_lemma_le(const ScenarioConfig& cfg, int k) {
    const std::uint64_t iseed = rng::derive(cfg.seed, static_cast<std::uint64_t>(k));
    rng::Stream s(iseed);
    static constexpr double kSigmas[] = {0.0, 0.25, 0.5, 0.75, 0.9};
    const SpaceSpec space = random_space(s, false, 6);
    json inst;
    inst["seed"] = iseed;
    inst["space"] = serialize::space_to_json(space);
    inst["family"] = family_json(random_family(s, space.dim, 5));
    inst["p"] = (k % 2 == 0) ? 1.0 : 2.0;
    inst["sigma"] = kSigmas[k % 5];
    return inst;
}

InstanceResult run_lemma_le(const ScenarioConfig& cfg, const json& inst) {
    const std::uint64_t seed = instance_seed(inst);
    const SpaceSpec space = serialize::space_from_json(inst.at("space"), "instances[].space");
    VectorFamily fam{space, family_from_json(inst.at("family"), "instances[].family")};
    const double p = inst.at("p").get<double>();
    const double sigma = inst.at("sigma").get<double>();

    const bool certified = space.exponent == 1.0 || space.is_infinity();
    CheckConfig cc = check_config(cfg, seed, certified ? 1e-10 : 1e-8);
    const summing::ChainValues chain = summing::summing_chain(fam, p, sigma, cc.engine);
    const double scaled = chain.max_norm_sigma * std::pow(chain.weak_base, 1.0 - sigma);

    digest::Fnv1a d;
    d.add(p);
    d.add(sigma);
    for (const Vector& v : fam.vectors) d.add(v.coords);
    const std::string dig = d.hex();

    InstanceResult out;
    out.checks.push_back(harness::make_inequality_report(
        "chain_weak_interp_le_mixed", chain.weak_interpolated, chain.mixed, 1.0, cc, dig));
    out.checks.push_back(harness::make_inequality_report("chain_mixed_le_norm_scaled", chain.mixed,
                                                         scaled, 1.0, cc, dig));
    out.checks.push_back(harness::make_inequality_report("chain_norm_scaled_le_weak", scaled,
                                                         chain.weak_base, 1.0, cc, dig));
    return out;
}

// --- leinc: interpolated-seminorm monotonicity in sigma -------------------

json gen_leinc(const ScenarioConfig& cfg, int k) {
    const std::uint64_t iseed = rng::derive(cfg.seed, static_cast<std::uint64_t>(k));
    rng::Stream s(iseed);
    const SpaceSpec space = random_space(s, true, 6);
    auto [ms, f] = random_function(s, space, 5);
    json inst;
    inst["seed"] = iseed;
    inst["function"] = serialize::function_to_json(ms, f);
    inst["p"] = (k % 2 == 0) ? 1.0 : 2.0;
    inst["grid"] = json::array({0.0, 0.2, 0.4, 0.6, 0.8, 1.0});
    return inst;
}

InstanceResult run_leinc(const ScenarioConfig& cfg, const json& inst) {
    const std::uint64_t seed = instance_seed(inst);
    auto [ms, f] = serialize::function_from_json(inst.at("function"), "instances[].function");
    const double p = inst.at("p").get<double>();
    std::vector<double> grid;
    for (const json& g : inst.at("grid")) grid.push_back(g.get<double>());

    CheckConfig cc = check_config(cfg, seed, 1e-12);
    const std::vector<double> values = vfun::phi_norm_grid(f, ms, p, grid, cc.engine);

    digest::Fnv1a d;
    d.add(p);
    d.add(ms.masses);
    for (const Vector& v : f.values) d.add(v.coords);
    const std::string dig = d.hex();

    InstanceResult out;
    for (size_t i = 0; i + 1 < values.size(); ++i)
        out.checks.push_back(harness::make_inequality_report("phi_monotonicity", values[i],
                                                             values[i + 1], 1.0, cc, dig));
    return out;
}

// --- sandwich: pettis <= decomposition upper bound <= phi -----------------

json gen_sandwich(const ScenarioConfig& cfg, int k) {
    const std::uint64_t iseed = rng::derive(cfg.seed, static_cast<std::uint64_t>(k));
    rng::Stream s(iseed);
    static constexpr double kSigmas[] = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    const SpaceSpec space = random_space(s, true, 5);
    auto [ms, f] = random_function(s, space, 5);
    const int shape = k % 5;
    if (shape == 0) {
        // Constant function: all cells share the first value.
        for (Vector& v : f.values) v = f.values[0];
    } else if (shape == 1) {
        ms.masses.resize(1);
        f.values.resize(1);
    }
    json inst;
    inst["seed"] = iseed;
    inst["function"] = serialize::function_to_json(ms, f);
    inst["p"] = (k % 2 == 0) ? 1.0 : 2.0;
    inst["sigma"] = kSigmas[k % 6];
    inst["coincide"] = shape <= 1;
    return inst;
}

InstanceResult run_sandwich(const ScenarioConfig& cfg, const json& inst) {
    const std::uint64_t seed = instance_seed(inst);
    auto [ms, f] = serialize::function_from_json(inst.at("function"), "instances[].function");
    const double p = inst.at("p").get<double>();
    const double sigma = inst.at("sigma").get<double>();
    const bool coincide = inst.value("coincide", false);

    CheckConfig cc = check_config(cfg, seed, 1e-10);
    const double pettis = vfun::pettis_norm(f, ms, p, cc.engine);
    vfun::DecompositionSearchConfig dsc;
    dsc.engine = cc.engine;
    const double upper = vfun::convexified_norm_upper(f, ms, p, sigma, dsc).value;
    const double phi = vfun::phi_norm(f, ms, p, sigma, cc.engine);

    digest::Fnv1a d;
    d.add(p);
    d.add(sigma);
    d.add(ms.masses);
    for (const Vector& v : f.values) d.add(v.coords);
    const std::string dig = d.hex();

    InstanceResult out;
    out.checks.push_back(
        harness::make_inequality_report("sandwich_pettis_le_upper", pettis, upper, 1.0, cc, dig));
    out.checks.push_back(
        harness::make_inequality_report("sandwich_upper_le_phi", upper, phi, 1.0, cc, dig));
    if (coincide) {
        out.checks.push_back(
            harness::make_identity_report("sandwich_coincide_lower", pettis, upper, cc, dig));
        out.checks.push_back(
            harness::make_identity_report("sandwich_coincide_upper", upper, phi, cc, dig));
    }
    return out;
}

// --- prinint: equal-mass converse identities and forward soundness --------

json gen_prinint(const ScenarioConfig& cfg, int k) {
    const std::uint64_t iseed = rng::derive(cfg.seed, static_cast<std::uint64_t>(k));
    rng::Stream s(iseed);
    json inst;
    inst["seed"] = iseed;
    if (k % 8 == 7) {
        // Forward soundness: constant scaled from a searched ratio must pass.
        const SpaceSpec domain = random_space(s, true, 4);
        const SpaceSpec codomain = random_space(s, true, 4);
        Operator u = Operator::zero(domain, codomain);
        for (auto& row : u.matrix)
            for (double& v : row) v = s.normal();
        inst["kind"] = "forward";
        inst["operator"] = serialize::operator_to_json(u);
        inst["family"] = family_json(random_family(s, domain.dim, 4));
        return inst;
    }
    const int n = 1 + static_cast<int>(s.below(32));
    static constexpr double kAlphas[] = {1e-3, 0.1, 1.0};
    const SpaceSpec domain = random_space(s, false, 4);
    const SpaceSpec codomain = random_space(s, false, 4);
    Operator u = Operator::zero(domain, codomain);
    for (auto& row : u.matrix)
        for (double& v : row) v = s.normal();
    std::vector<Vector> xs;
    for (int i = 0; i < n; ++i) {
        Vector v = Vector::zero(domain.dim);
        for (int j = 0; j < domain.dim; ++j) v[j] = s.normal();
        xs.push_back(std::move(v));
    }
    std::vector<double> bs;
    for (int i = 0; i < n; ++i) bs.push_back(s.uniform(-2.0, 2.0));

    inst["kind"] = "converse";
    inst["kernel"] = s.below(2) == 0 ? "diestel" : "interpolated";
    inst["sigma"] = 0.25 * static_cast<double>(1 + s.below(3));
    inst["alpha"] = kAlphas[s.below(3)];
    inst["operator"] = serialize::operator_to_json(u);
    inst["xs"] = family_json(xs);
    inst["bs"] = json(bs);
    return inst;
}

harness::RSKernel kernel_from_json(const json& inst) {
    const std::string name = inst.at("kernel").get<std::string>();
    if (name == "diestel") return harness::RSKernel::diestel();
    if (name == "interpolated")
        return harness::RSKernel::interpolated(inst.at("sigma").get<double>());
    throw ConfigError("config field 'instances[].kernel': unknown kernel '" + name + "'");
}

InstanceResult run_prinint(const ScenarioConfig& cfg, const json& inst) {
    const std::uint64_t seed = instance_seed(inst);
    const Operator u = serialize::operator_from_json(inst.at("operator"), "instances[].operator");
    InstanceResult out;

    if (inst.at("kind").get<std::string>() == "forward") {
        VectorFamily fam{u.domain, family_from_json(inst.at("family"), "instances[].family")};
        CheckConfig cc = check_config(cfg, seed, 1e-12);
        summing::SummingParams params;
        params.kind = summing::SummingKind::p_summing;
        params.p = 1.0;
        double ratio = 0.0;
        try {
            ratio = summing::summing_ratio(u, fam, params, cc.engine);
        } catch (const InputError&) {
            ratio = 0.0;  // degenerate family or zero operator
        }
        const double constant = ratio > 0.0 ? ratio * (1.0 + 1e-6) : 1.0;
        const int n = static_cast<int>(fam.vectors.size());
        const MeasureSpace ms = vfun::equal_mass_partition(n, 1.0 / n);
        SimpleFunction f;
        f.space = u.domain;
        f.values = fam.vectors;
        SimpleFunction g;
        g.space = SpaceSpec(1, 1.0);
        g.values.assign(static_cast<size_t>(n), Vector(std::vector<double>{1.0}));
        CheckReport r =
            harness::check_forward_domination(u, f, g, ms, harness::RSKernel::diestel(), constant, cc);
        r.check = "forward_soundness";
        out.checks.push_back(std::move(r));
        return out;
    }

    VectorFamily xs{u.domain, family_from_json(inst.at("xs"), "instances[].xs")};
    std::vector<Vector> bs;
    for (const json& b : inst.at("bs")) bs.push_back(Vector(std::vector<double>{b.get<double>()}));
    const double alpha = inst.at("alpha").get<double>();
    CheckConfig cc = check_config(cfg, seed, 1e-12);
    const harness::ConverseReport rep =
        harness::check_converse_construction(u, xs, bs, kernel_from_json(inst), alpha, cc);
    out.checks.push_back(rep.strong_identity);
    out.checks.push_back(rep.weak_identity);
    return out;
}

// --- q11: composition bound on identification maps, sigma-0 reduction -----

json gen_q11(const ScenarioConfig& cfg, int k) {
    const std::uint64_t iseed = rng::derive(cfg.seed, static_cast<std::uint64_t>(k));
    rng::Stream s(iseed);
    const double p = (k % 2 == 0) ? 1.0 : 2.0;
    const int n = 2 + static_cast<int>(s.below(5));
    std::vector<double> nu;
    for (int j = 0; j < n; ++j) nu.push_back(s.uniform(0.2, 1.2));
    const Operator u = harness::make_identification_map(n, p, nu);
    auto [ms, f] = random_function(s, u.domain, 4);

    double total = 0.0;
    for (double w : nu) total += w;

    json inst;
    inst["seed"] = iseed;
    inst["operator"] = serialize::operator_to_json(u);
    inst["function"] = serialize::function_to_json(ms, f);
    inst["sigma"] = 1.0 - 1.0 / p;
    inst["C"] = total;
    return inst;
}

InstanceResult run_q11(const ScenarioConfig& cfg, const json& inst) {
    const std::uint64_t seed = instance_seed(inst);
    const Operator u = serialize::operator_from_json(inst.at("operator"), "instances[].operator");
    auto [ms, f] = serialize::function_from_json(inst.at("function"), "instances[].function");
    const double sigma = inst.at("sigma").get<double>();
    const double constant = inst.at("C").get<double>();

    CheckConfig cc = check_config(cfg, seed, 1e-10);
    InstanceResult out;
    const CheckReport r = harness::check_integrability_improvement(u, f, ms, sigma, constant, cc);
    out.checks.push_back(r);

    if (sigma == 0.0) {
        // The interpolated kernel at sigma = 0 must reproduce the diestel
        // check bit for bit.
        SimpleFunction g;
        g.space = SpaceSpec(1, 1.0);
        g.values.assign(f.values.size(), Vector(std::vector<double>{1.0}));
        const CheckReport d = harness::check_forward_domination(
            u, f, g, ms, harness::RSKernel::diestel(), constant, cc);
        CheckConfig exact = cc;
        exact.tolerance = 0.0;
        out.checks.push_back(
            harness::make_identity_report("q11_reduction_lhs", r.lhs, d.lhs, exact, r.inputs_digest));
        out.checks.push_back(
            harness::make_identity_report("q11_reduction_rhs", r.rhs, d.rhs, exact, r.inputs_digest));
    }
    return out;
}

// --- jp: identification-map norm exactness and composition batch ----------

json gen_jp(const ScenarioConfig& cfg, int k) {
    const std::uint64_t iseed = rng::derive(cfg.seed, static_cast<std::uint64_t>(k));
    rng::Stream s(iseed);
    const int n = 2 + static_cast<int>(s.below(11));
    std::vector<double> nu;
    for (int j = 0; j < n; ++j) nu.push_back(s.uniform(0.1, 1.0));
    json inst;
    inst["seed"] = iseed;
    inst["n"] = n;
    inst["p"] = 1.0;
    inst["nu"] = json(nu);
    int batch = 20;
    if (cfg.raw.contains("jp")) batch = cfg.raw["jp"].value("batch", batch);
    inst["batch"] = batch;
    return inst;
}

InstanceResult run_jp(const ScenarioConfig& cfg, const json& inst) {
    const std::uint64_t seed = instance_seed(inst);
    const int n = inst.at("n").get<int>();
    const double p = inst.at("p").get<double>();
    std::vector<double> nu;
    for (const json& w : inst.at("nu")) nu.push_back(w.get<double>());
    const int batch = inst.at("batch").get<int>();

    double exact = 0.0;
    for (double w : nu) exact += w;

    CheckConfig cc = check_config(cfg, seed, 1e-10);
    const summing::FamilySearchConfig search = family_config(cfg, seed);
    const harness::ScenarioJpReport scenario = harness::scenario_jp(n, p, nu, batch, search, cc);

    digest::Fnv1a d;
    d.add(n);
    d.add(p);
    d.add(nu);
    const std::string dig = d.hex();

    InstanceResult out;
    out.estimates.push_back({"jp_ideal_norm", scenario.estimate});

    CheckConfig exact_cc = cc;
    exact_cc.tolerance = cfg.tol(0.0);
    out.checks.push_back(harness::make_identity_report("jp_oracle_value", scenario.estimate.value,
                                                       exact, exact_cc, dig));

    const Operator jmap = harness::make_identification_map(n, p, nu);
    summing::SummingParams params;
    params.kind = summing::SummingKind::p_summing;
    params.p = p;

    // Best searched ratio, recomputed from the recorded witness family.
    double searched = 0.0;
    if (scenario.estimate.diagnostics.best_family &&
        !scenario.estimate.diagnostics.best_family->vectors.empty())
        searched = summing::summing_ratio(jmap, *scenario.estimate.diagnostics.best_family, params,
                                          search.dual_ball);
    CheckConfig bound_cc = cc;
    bound_cc.tolerance = cfg.tol(1e-9);
    out.checks.push_back(
        harness::make_inequality_report("jp_search_bound", searched, exact, 1.0, bound_cc, dig));

    VectorFamily ones{jmap.domain,
                      {Vector(std::vector<double>(static_cast<size_t>(n), 1.0))}};
    const double ones_ratio = summing::summing_ratio(jmap, ones, params, search.dual_ball);
    out.checks.push_back(
        harness::make_identity_report("jp_ones_attains", ones_ratio, exact, exact_cc, dig));

    // Brute force over every sign-vector singleton family.
    double best_sign = 0.0;
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        Vector v = Vector::zero(n);
        for (int j = 0; j < n; ++j) v[j] = ((mask >> j) & 1U) ? 1.0 : -1.0;
        VectorFamily fam{jmap.domain, {std::move(v)}};
        best_sign = std::max(best_sign,
                             summing::summing_ratio(jmap, fam, params, search.dual_ball));
    }
    out.checks.push_back(harness::make_inequality_report("jp_sign_vector_bound", best_sign, exact,
                                                         1.0, bound_cc, dig));

    for (const CheckReport& c : scenario.checks) out.checks.push_back(c);
    return out;
}

// --- hilbert: 2-summing agreement with the entrywise norm -----------------

json gen_hilbert(const ScenarioConfig& cfg, int k) {
    const std::uint64_t iseed = rng::derive(cfg.seed, static_cast<std::uint64_t>(k));
    rng::Stream s(iseed);
    const int n = 2 + (k % 4);
    json rows = json::array();
    for (int i = 0; i < n; ++i) {
        json row = json::array();
        for (int j = 0; j < n; ++j) row.push_back(s.normal());
        rows.push_back(std::move(row));
    }
    json inst;
    inst["seed"] = iseed;
    inst["matrix"] = std::move(rows);
    return inst;
}

InstanceResult run_hilbert(const ScenarioConfig& cfg, const json& inst) {
    const std::uint64_t seed = instance_seed(inst);
    const json& rows = inst.at("matrix");
    const int n = static_cast<int>(rows.size());
    Operator T = Operator::zero(SpaceSpec(n, 2.0), SpaceSpec(n, 2.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            T.matrix[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                rows[static_cast<size_t>(i)][static_cast<size_t>(j)].get<double>();

    const double hs = summing::hilbert_schmidt_norm(T);
    summing::SummingParams params;
    params.kind = summing::SummingKind::p_summing;
    params.p = 2.0;

    digest::Fnv1a d;
    for (const auto& row : T.matrix) d.add(row);
    const std::string dig = d.hex();

    CheckConfig cc = check_config(cfg, seed, 1e-10);
    InstanceResult out;

    VectorFamily basis{T.domain, {}};
    for (int j = 0; j < n; ++j) basis.vectors.push_back(Vector::unit(n, j));
    const double basis_ratio = summing::summing_ratio(T, basis, params, cc.engine);
    out.checks.push_back(
        harness::make_identity_report("hilbert_basis_ratio_equals_hs", basis_ratio, hs, cc, dig));

    summing::FamilySearchConfig search = family_config(cfg, seed);
    search.use_oracles = true;
    const summing::NormEstimate oracle = summing::estimate_ideal_norm_lower(T, params, search);
    CheckConfig exact_cc = cc;
    exact_cc.tolerance = cfg.tol(0.0);
    out.checks.push_back(
        harness::make_identity_report("hilbert_oracle_value", oracle.value, hs, exact_cc, dig));
    out.estimates.push_back({"hilbert_ideal_norm", oracle});

    search.use_oracles = false;
    const summing::NormEstimate searched = summing::estimate_ideal_norm_lower(T, params, search);
    CheckConfig bound_cc = cc;
    bound_cc.tolerance = cfg.tol(1e-8);
    out.checks.push_back(harness::make_inequality_report("hilbert_search_bound", searched.value,
                                                         hs, 1.0, bound_cc, dig));
    if (n <= 3) {
        CheckConfig reach_cc = cc;
        reach_cc.tolerance = cfg.tol(1e-12);
        out.checks.push_back(harness::make_inequality_report(
            "hilbert_search_reaches", 0.99 * hs, searched.value, 1.0, reach_cc, dig));
    }
    return out;
}

// ---------------------------------------------------------------------------
// suite registry and the verify driver
// ---------------------------------------------------------------------------

struct SuiteDef {
    std::string name;
    int default_count;
    json (*gen)(const ScenarioConfig&, int);
    InstanceResult (*run)(const ScenarioConfig&, const json&);
};

const std::vector<SuiteDef>& suite_registry() {
    static const std::vector<SuiteDef> defs = {
        {"lemma_le", 1000, gen_lemma_le, run_lemma_le},
        {"leinc", 1000, gen_leinc, run_leinc},
        {"sandwich", 1000, gen_sandwich, run_sandwich},
        {"prinint", 512, gen_prinint, run_prinint},
        {"q11", 200, gen_q11, run_q11},
        {"jp", 4, gen_jp, run_jp},
        {"hilbert", 40, gen_hilbert, run_hilbert},
    };
    return defs;
}

std::string effective_config_digest(const ScenarioConfig& cfg) {
    json doc = cfg.raw;
    doc.erase("out");
    doc.erase("parallelism");
    doc["command"] = cfg.command;
    digest::Fnv1a d;
    d.add(doc.dump());
    return d.hex();
}

} // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const SuiteDef& s : suite_registry()) out.push_back(s.name);
        return out;
    }();
    return names;
}

ScenarioConfig config_from_json(const json& doc, const std::string& command) {
    if (!doc.is_object()) throw ConfigError("config root: expected an object");
    ScenarioConfig cfg;
    cfg.command = command;
    cfg.raw = doc;
    if (!doc.contains("seed") || !doc["seed"].is_number())
        throw ConfigError("config field 'seed': missing or not a number");
    cfg.seed = doc["seed"].get<std::uint64_t>();
    cfg.suite = doc.value("suite", "");
    cfg.out_dir = doc.value("out", "out");
    if (doc.contains("tolerance")) {
        if (!doc["tolerance"].is_number())
            throw ConfigError("config field 'tolerance': expected a number");
        cfg.tolerance = doc["tolerance"].get<double>();
    }
    if (doc.contains("parallelism")) {
        if (!doc["parallelism"].is_number_integer() || doc["parallelism"].get<int>() < 1)
            throw ConfigError("config field 'parallelism': expected a positive integer");
        cfg.parallelism = doc["parallelism"].get<int>();
    }
    if (doc.contains("instances") && doc["instances"].is_number_integer()) {
        cfg.instances = doc["instances"].get<int>();
        if (cfg.instances < 1)
            throw ConfigError("config field 'instances': expected a positive count or an array");
    }
    return cfg;
}

bool RunReport::all_pass() const {
    for (const auto& [idx, check] : checks)
        if (!check.pass) return false;
    return true;
}

int RunReport::failures() const {
    int n = 0;
    for (const auto& [idx, check] : checks)
        if (!check.pass) ++n;
    return n;
}

RunReport cmd_estimate_norm(const ScenarioConfig& cfg) {
    if (!cfg.raw.contains("operator"))
        throw ConfigError("config field 'operator': missing");
    if (!cfg.raw.contains("params")) throw ConfigError("config field 'params': missing");
    const Operator T = serialize::operator_from_json(cfg.raw["operator"], "operator");
    const summing::SummingParams params = serialize::params_from_json(cfg.raw["params"], "params");

    RunReport rep;
    rep.command = cfg.command;
    rep.seed = cfg.seed;
    rep.config_digest = effective_config_digest(cfg);
    rep.estimates.push_back(
        {"ideal_norm", summing::estimate_ideal_norm_lower(T, params, family_config(cfg, cfg.seed))});
    return rep;
}

RunReport cmd_verify(const ScenarioConfig& cfg) {
    const SuiteDef* def = nullptr;
    for (const SuiteDef& s : suite_registry())
        if (s.name == cfg.suite) def = &s;
    if (def == nullptr)
        throw ConfigError("config field 'suite': unknown suite '" + cfg.suite +
                          "' (expected one of lemma_le, leinc, sandwich, prinint, q11, jp, hilbert)");

    std::vector<json> instances;
    if (cfg.raw.contains("instances") && cfg.raw["instances"].is_array()) {
        for (const json& inst : cfg.raw["instances"]) instances.push_back(inst);
        if (instances.empty()) throw ConfigError("config field 'instances': array is empty");
    } else {
        const int count = cfg.instances > 0 ? cfg.instances : def->default_count;
        for (int k = 0; k < count; ++k) instances.push_back(def->gen(cfg, k));
    }

    // Instance-parallel execution; results merged in instance order, so the
    // output is identical at every parallelism level.
    std::vector<InstanceResult> results(instances.size());
    const int shards = std::max(1, cfg.parallelism);
    auto worker = [&](int shard) {
        for (size_t k = static_cast<size_t>(shard); k < instances.size();
             k += static_cast<size_t>(shards))
            results[k] = def->run(cfg, instances[k]);
    };
    if (shards == 1) {
        worker(0);
    } else {
        std::vector<std::future<void>> futs;
        for (int shard = 0; shard < shards; ++shard)
            futs.push_back(std::async(std::launch::async, worker, shard));
        for (auto& f : futs) f.get();
    }

    RunReport rep;
    rep.command = cfg.command;
    rep.suite = cfg.suite;
    rep.seed = cfg.seed;
    rep.config_digest = effective_config_digest(cfg);
    for (size_t k = 0; k < results.size(); ++k) {
        bool failed = false;
        for (const CheckReport& c : results[k].checks) {
            if (!c.pass) failed = true;
            rep.checks.emplace_back(static_cast<int>(k), c);
        }
        for (const NamedEstimate& e : results[k].estimates) rep.estimates.push_back(e);
        if (failed) {
            json ce;
            ce["command"] = "verify";
            ce["suite"] = cfg.suite;
            ce["seed"] = cfg.seed;
            if (cfg.tolerance) ce["tolerance"] = *cfg.tolerance;
            ce["instances"] = json::array({instances[k]});
            rep.counterexamples.push_back(std::move(ce));
        }
    }
    return rep;
}

RunReport cmd_sweep(const ScenarioConfig& cfg) {
    if (!cfg.raw.contains("function")) throw ConfigError("config field 'function': missing");
    auto [ms, f] = serialize::function_from_json(cfg.raw["function"], "function");
    const double p = cfg.raw.value("p", 1.0);
    if (!(p >= 1.0)) throw ConfigError("config field 'p': must be >= 1");
    if (!cfg.raw.contains("sigma_grid") || !cfg.raw["sigma_grid"].is_array() ||
        cfg.raw["sigma_grid"].empty())
        throw ConfigError("config field 'sigma_grid': expected a nonempty array");
    std::vector<double> grid;
    for (const json& g : cfg.raw["sigma_grid"]) {
        if (!g.is_number()) throw ConfigError("config field 'sigma_grid': expected numbers");
        grid.push_back(g.get<double>());
    }
    for (size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0) || grid[i] >= 1.0)
            throw ConfigError("config field 'sigma_grid': values must lie in [0, 1)");
        if (i > 0 && grid[i] < grid[i - 1])
            throw ConfigError("config field 'sigma_grid': values must be nondecreasing");
    }
    Operator u = cfg.raw.contains("operator")
                     ? serialize::operator_from_json(cfg.raw["operator"], "operator")
                     : Operator::identity(f.space);
    if (!(u.domain == f.space))
        throw ConfigError("config field 'operator': domain does not match the function space");
    double constant = 1.0;
    if (cfg.raw.contains("C")) {
        if (!cfg.raw["C"].is_number() || !(cfg.raw["C"].get<double>() > 0.0))
            throw ConfigError("config field 'C': expected a positive number");
        constant = cfg.raw["C"].get<double>();
    }

    CheckConfig cc = check_config(cfg, cfg.seed, 1e-12);
    const std::vector<double> phis = vfun::phi_norm_grid(f, ms, p, grid, cc.engine);

    // Family of the nonzero cell values, used for the mixed supremum column.
    VectorFamily values{f.space, {}};
    for (const Vector& v : f.values) {
        bool zero = true;
        for (double c : v.coords)
            if (c != 0.0) zero = false;
        if (!zero) values.vectors.push_back(v);
    }

    RunReport rep;
    rep.command = cfg.command;
    rep.seed = cfg.seed;
    rep.config_digest = effective_config_digest(cfg);
    rep.sweep_header = "sigma,phi,mixed_sup,q11_lhs,q11_rhs,q11_margin";

    digest::Fnv1a d;
    d.add(p);
    d.add(ms.masses);
    for (const Vector& v : f.values) d.add(v.coords);
    const std::string dig = d.hex();

    for (size_t i = 0; i < grid.size(); ++i) {
        const double sigma = grid[i];
        const double mixed = values.vectors.empty()
                                 ? 0.0
                                 : summing::mixed_power_sup(values, p, sigma, cc.engine);
        const CheckReport q11 =
            harness::check_integrability_improvement(u, f, ms, sigma, constant, cc);
        std::string row = serialize::format_double(sigma);
        row += "," + serialize::format_double(phis[i]);
        row += "," + serialize::format_double(mixed);
        row += "," + serialize::format_double(q11.lhs);
        row += "," + serialize::format_double(q11.rhs);
        row += "," + serialize::format_double(q11.margin);
        rep.sweep_rows.push_back(std::move(row));
        if (i > 0)
            rep.checks.emplace_back(static_cast<int>(i) - 1,
                                    harness::make_inequality_report("sweep_phi_monotone",
                                                                    phis[i - 1], phis[i], 1.0, cc,
                                                                    dig));
    }
    return rep;
}

void write_outputs(const RunReport& rep, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    {
        std::ofstream out(fs::path(out_dir) / "checks.jsonl", std::ios::binary);
        for (const auto& [idx, check] : rep.checks)
            out << serialize::check_report_line(check, idx) << "\n";
    }
    {
        std::ofstream out(fs::path(out_dir) / "summary.csv", std::ios::binary);
        out << "check,lhs,rhs,C,margin,pass,seed\n";
        for (const auto& [idx, check] : rep.checks)
            out << serialize::check_report_csv_row(check) << "\n";
    }
    {
        std::ofstream out(fs::path(out_dir) / "estimates.jsonl", std::ios::binary);
        for (const NamedEstimate& e : rep.estimates)
            out << serialize::estimate_line(e.name, e.estimate) << "\n";
    }
    {
        std::ofstream out(fs::path(out_dir) / "counterexamples.jsonl", std::ios::binary);
        for (const json& ce : rep.counterexamples) out << ce.dump() << "\n";
    }
    if (!rep.sweep_rows.empty()) {
        std::ofstream out(fs::path(out_dir) / "sweep.csv", std::ios::binary);
        out << rep.sweep_header << "\n";
        for (const std::string& row : rep.sweep_rows) out << row << "\n";
    }
    {
        std::ofstream out(fs::path(out_dir) / "report.json", std::ios::binary);
        out << "{\"tool_version\":\"" << kToolVersion << "\"";
        out << ",\"command\":\"" << serialize::escape(rep.command) << "\"";
        if (!rep.suite.empty()) out << ",\"suite\":\"" << serialize::escape(rep.suite) << "\"";
        out << ",\"seed\":" << rep.seed;
        out << ",\"config_digest\":\"" << rep.config_digest << "\"";
        out << ",\"checks\":" << rep.checks.size();
        out << ",\"failures\":" << rep.failures();
        out << ",\"estimates\":" << rep.estimates.size();
        out << "}\n";
    }
}

} // namespace banlab::suites
