#include "banlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "banlab/digest.hpp"
#include "banlab/rng.hpp"

namespace banlab::harness {

using spaces::DualBallPool;
using spaces::DualObjective;
using summing::Operator;
using vfun::MeasureSpace;
using vfun::SimpleFunction;

RSKernel RSKernel::diestel() {
    RSKernel k;
    k.name = "diestel";
    k.g_space = SpaceSpec(1, 1.0);
    k.strong = [](const Operator& T, const Vector& x, const Vector& b) {
        return std::abs(b[0]) * spaces::norm(T.codomain, T.apply(x));
    };
    k.weak = [](const SpaceSpec&, const Functional& phi, const Vector& x, const Vector& b) {
        return std::abs(b[0]) * std::abs(spaces::dual_pair(x, phi));
    };
    k.weak_convex_in_phi = true;
    return k;
}

RSKernel RSKernel::interpolated(double sigma) {
    if (!(sigma >= 0.0) || sigma >= 1.0)
        throw InputError("RSKernel::interpolated: sigma must satisfy 0 <= sigma < 1");
    RSKernel k;
    k.name = "interpolated";
    k.g_space = SpaceSpec(1, 1.0);
    const double strong_power = 1.0 / (1.0 - sigma);
    const double weak_power = sigma / (1.0 - sigma);
    k.strong = [strong_power](const Operator& T, const Vector& x, const Vector& b) {
        return std::pow(spaces::norm(T.codomain, T.apply(x)), strong_power) * std::abs(b[0]);
    };
    k.weak = [weak_power](const SpaceSpec& space, const Functional& phi, const Vector& x,
                          const Vector& b) {
        // std::pow(t, 0) == 1 for every t, so the sigma = 0 instance
        // evaluates identically to the diestel kernel on every input.
        return std::abs(spaces::dual_pair(x, phi)) *
               std::pow(spaces::norm(space, x), weak_power) * std::abs(b[0]);
    };
    k.weak_convex_in_phi = true;
    return k;
}

CheckReport make_inequality_report(std::string check, double lhs, double rhs, double constant,
                                   const CheckConfig& config, std::string digest) {
    CheckReport r;
    r.check = std::move(check);
    r.kind = "inequality";
    r.lhs = lhs;
    r.rhs = rhs;
    r.constant = constant;
    r.margin = constant * rhs - lhs;
    r.tolerance = config.tolerance;
    r.pass = r.margin >= -config.tolerance;
    r.inputs_digest = std::move(digest);
    r.seed = config.seed;
    return r;
}

CheckReport make_identity_report(std::string check, double lhs, double rhs,
                                 const CheckConfig& config, std::string digest) {
    CheckReport r;
    r.check = std::move(check);
    r.kind = "identity";
    r.lhs = lhs;
    r.rhs = rhs;
    r.constant = 1.0;
    r.margin = rhs - lhs;
    r.tolerance = config.tolerance;
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    r.pass = std::abs(lhs - rhs) <= config.tolerance * scale;
    r.inputs_digest = std::move(digest);
    r.seed = config.seed;
    return r;
}

namespace {

std::string digest_inputs(const Operator& u, const SimpleFunction& f, const SimpleFunction& g,
                          const MeasureSpace& ms, const std::string& kernel, double constant) {
    digest::Fnv1a d;
    d.add(kernel);
    d.add(constant);
    for (const auto& row : u.matrix) d.add(row);
    d.add(ms.masses);
    for (const Vector& v : f.values) d.add(v.coords);
    for (const Vector& v : g.values) d.add(v.coords);
    return d.hex();
}

void probe_zero_conditions(const Operator& u, const SimpleFunction& f, const SimpleFunction& g,
                           const RSKernel& kernel) {
    const Vector zero_x = Vector::zero(f.space.dim);
    const Vector zero_b = Vector::zero(kernel.g_space.dim);
    for (size_t k = 0; k < f.values.size(); ++k) {
        const Functional phi = spaces::norming_functional(f.space, f.values[k]);
        if (kernel.strong(u, zero_x, g.values[k]) != 0.0 ||
            kernel.strong(u, f.values[k], zero_b) != 0.0 ||
            kernel.weak(f.space, phi, zero_x, g.values[k]) != 0.0 ||
            kernel.weak(f.space, phi, f.values[k], zero_b) != 0.0)
            throw InputError("kernel contract: zero conditions violated for kernel '" +
                             kernel.name + "'");
    }
}

DualObjective weak_integral_objective(const SimpleFunction& f, const SimpleFunction& g,
                                      const MeasureSpace& ms, const RSKernel& kernel) {
    DualObjective obj;
    obj.convex_in_phi = kernel.weak_convex_in_phi;
    auto space = std::make_shared<SpaceSpec>(f.space);
    auto fv = std::make_shared<std::vector<Vector>>(f.values);
    auto gv = std::make_shared<std::vector<Vector>>(g.values);
    auto masses = std::make_shared<std::vector<double>>(ms.masses);
    auto weak = kernel.weak;
    obj.value = [space, fv, gv, masses, weak](const Functional& phi) {
        double s = 0.0;
        for (size_t k = 0; k < fv->size(); ++k)
            s += (*masses)[k] * weak(*space, phi, (*fv)[k], (*gv)[k]);
        return s;
    };
    for (const Vector& x : f.values)
        obj.hint_starts.push_back(spaces::norming_functional(f.space, x));
    return obj;
}

SimpleFunction constant_one_companion(const SpaceSpec& g_space, int cells) {
    SimpleFunction g;
    g.space = g_space;
    g.values.assign(static_cast<size_t>(cells), Vector(std::vector<double>{1.0}));
    return g;
}

} // namespace

CheckReport check_forward_domination(const Operator& u, const SimpleFunction& f,
                                     const SimpleFunction& g, const MeasureSpace& ms,
                                     const RSKernel& kernel, double constant,
                                     const CheckConfig& config) {
    u.validate();
    f.validate();
    g.validate();
    ms.validate();
    if (f.cells() != ms.cells() || g.cells() != ms.cells())
        throw InputError("check_forward_domination: cell counts differ");
    if (!(f.space == u.domain))
        throw InputError("check_forward_domination: f is not valued in the operator domain");
    if (!(g.space == kernel.g_space))
        throw InputError("check_forward_domination: g is not valued in the kernel G space");
    if (!(constant > 0.0)) throw InputError("check_forward_domination: constant must be positive");
    probe_zero_conditions(u, f, g, kernel);

    double lhs = 0.0;
    for (size_t k = 0; k < f.values.size(); ++k)
        lhs += ms.masses[k] * kernel.strong(u, f.values[k], g.values[k]);

    const DualObjective obj = weak_integral_objective(f, g, ms, kernel);
    const double rhs = spaces::sup_convex_over_dual_ball(f.space, obj, config.engine).value;

    return make_inequality_report("forward_domination", lhs, rhs, constant, config,
                                  digest_inputs(u, f, g, ms, kernel.name, constant));
}

ConverseReport check_converse_construction(const Operator& u, const summing::VectorFamily& xs,
                                           const std::vector<Vector>& bs, const RSKernel& kernel,
                                           double alpha, const CheckConfig& config) {
    u.validate();
    xs.validate();
    if (xs.vectors.size() != bs.size())
        throw InputError("check_converse_construction: family lengths differ");
    if (!(alpha > 0.0)) throw InputError("check_converse_construction: alpha must be positive");
    if (!(xs.space == u.domain))
        throw InputError("check_converse_construction: family space does not match domain");
    for (const Vector& b : bs) require_dim(kernel.g_space, b, "check_converse_construction");

    const int n = static_cast<int>(xs.vectors.size());
    const MeasureSpace ms = vfun::equal_mass_partition(n, alpha);
    SimpleFunction f;
    f.space = xs.space;
    f.values = xs.vectors;
    SimpleFunction g;
    g.space = kernel.g_space;
    g.values = bs;
    probe_zero_conditions(u, f, g, kernel);

    digest::Fnv1a d;
    d.add(kernel.name);
    d.add(alpha);
    for (const auto& row : u.matrix) d.add(row);
    for (const Vector& v : xs.vectors) d.add(v.coords);
    for (const Vector& v : bs) d.add(v.coords);
    const std::string dig = d.hex();

    // Strong side: integral of the cellwise kernel vs alpha times the
    // discrete sum.
    double integral_strong = 0.0;
    double discrete_strong = 0.0;
    for (int i = 0; i < n; ++i) {
        const double s = kernel.strong(u, xs.vectors[static_cast<size_t>(i)],
                                       bs[static_cast<size_t>(i)]);
        integral_strong += ms.masses[static_cast<size_t>(i)] * s;
        discrete_strong += s;
    }
    ConverseReport out;
    out.strong_identity = make_identity_report("converse_strong_identity", integral_strong,
                                               alpha * discrete_strong, config, dig);

    // Weak side: both suprema evaluated over one shared pool; the two
    // objectives are proportional, so the identity is exact up to rounding.
    const DualObjective integral_obj = weak_integral_objective(f, g, ms, kernel);
    DualObjective discrete_obj;
    discrete_obj.convex_in_phi = kernel.weak_convex_in_phi;
    {
        auto space = std::make_shared<SpaceSpec>(xs.space);
        auto fv = std::make_shared<std::vector<Vector>>(xs.vectors);
        auto gv = std::make_shared<std::vector<Vector>>(bs);
        auto weak = kernel.weak;
        discrete_obj.value = [space, fv, gv, weak](const Functional& phi) {
            double s = 0.0;
            for (size_t k = 0; k < fv->size(); ++k)
                s += weak(*space, phi, (*fv)[k], (*gv)[k]);
            return s;
        };
    }
    const DualBallPool pool =
        spaces::build_dual_ball_pool(xs.space, {&integral_obj, &discrete_obj}, config.engine);
    const double integral_weak = spaces::evaluate_max(pool, integral_obj).value;
    const double discrete_weak = spaces::evaluate_max(pool, discrete_obj).value;
    out.weak_identity = make_identity_report("converse_weak_identity", integral_weak,
                                             alpha * discrete_weak, config, dig);
    return out;
}

CheckReport check_integrability_improvement(const Operator& u, const SimpleFunction& f,
                                            const MeasureSpace& ms, double sigma, double constant,
                                            const CheckConfig& config) {
    if (!(sigma >= 0.0) || sigma >= 1.0)
        throw InputError("check_integrability_improvement: sigma must satisfy 0 <= sigma < 1");
    const RSKernel kernel = RSKernel::interpolated(sigma);
    const SimpleFunction g = constant_one_companion(kernel.g_space, f.cells());
    CheckReport r = check_forward_domination(u, f, g, ms, kernel, constant, config);
    r.check = "integrability_improvement";
    return r;
}

CheckReport check_phi_monotone(const SimpleFunction& f, const MeasureSpace& ms, double p,
                               double sigma1, double sigma2, const CheckConfig& config) {
    if (!(sigma1 >= 0.0) || sigma1 > sigma2 || sigma2 > 1.0)
        throw InputError("check_phi_monotone: need 0 <= sigma1 <= sigma2 <= 1");
    const std::vector<double> values =
        vfun::phi_norm_grid(f, ms, p, {sigma1, sigma2}, config.engine);

    digest::Fnv1a d;
    d.add(p);
    d.add(sigma1);
    d.add(sigma2);
    d.add(ms.masses);
    for (const Vector& v : f.values) d.add(v.coords);
    CheckReport r =
        make_inequality_report("phi_monotonicity", values[0], values[1], 1.0, config, d.hex());
    return r;
}

Operator make_identification_map(int n, double p, const std::vector<double>& nu) {
    if (static_cast<int>(nu.size()) != n)
        throw InputError("make_identification_map: nu length must equal n");
    Operator j = Operator::identity(SpaceSpec(n, kInfExponent));
    j.codomain = SpaceSpec(n, p, nu);
    j.validate();
    return j;
}

ScenarioJpReport scenario_jp(int n, double p, const std::vector<double>& nu, int batch,
                             const summing::FamilySearchConfig& search,
                             const CheckConfig& config) {
    const Operator j = make_identification_map(n, p, nu);
    summing::SummingParams params;
    params.kind = summing::SummingKind::p_summing;
    params.p = p;

    ScenarioJpReport out;
    out.estimate = summing::estimate_ideal_norm_lower(j, params, search);

    double constant = out.estimate.value;
    if (p == 1.0) {
        constant = 0.0;
        for (double w : nu) constant += w;
    }
    const double sigma = 1.0 - 1.0 / p;

    for (int k = 0; k < batch; ++k) {
        rng::Stream stream(rng::derive(config.seed, static_cast<std::uint64_t>(k)));
        const int cells = 1 + static_cast<int>(stream.below(4));
        MeasureSpace ms;
        SimpleFunction f;
        f.space = j.domain;
        for (int c = 0; c < cells; ++c) {
            ms.masses.push_back(stream.uniform(0.25, 1.25));
            Vector v = Vector::zero(n);
            for (int i = 0; i < n; ++i) v[i] = stream.normal();
            f.values.push_back(std::move(v));
        }
        CheckConfig inst = config;
        inst.seed = rng::derive(config.seed, static_cast<std::uint64_t>(k));
        out.checks.push_back(check_integrability_improvement(j, f, ms, sigma, constant, inst));
    }
    return out;
}

} // namespace banlab::harness
