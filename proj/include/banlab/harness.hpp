#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "banlab/summing.hpp"
#include "banlab/types.hpp"
#include "banlab/vfun.hpp"

namespace banlab::harness {

/// Abstract strong/weak kernel pair. The strong side scores an operator
/// against a vector and a G-space companion; the weak side scores a dual
/// functional the same way (the vector's space is passed in so kernels can
/// take norms), and both must vanish whenever the vector or the companion
/// is zero.
struct RSKernel {
    std::string name;
    SpaceSpec g_space;
    std::function<double(const summing::Operator&, const Vector&, const Vector&)> strong;
    std::function<double(const SpaceSpec&, const Functional&, const Vector&, const Vector&)> weak;
    bool weak_convex_in_phi = true;

    /// S(T, x, b) = |b| ||T x||,  R(phi, x, b) = |b| |phi(x)|, scalar G.
    /// The classical absolutely-summing kernel.
    static RSKernel diestel();

    /// S(u, x, b) = ||u x||^(1/(1-sigma)) |b|,
    /// R(phi, x, b) = |<x, phi>| ||x||^(sigma/(1-sigma)) |b|, scalar G.
    /// At sigma = 0 this evaluates identically to diestel().
    static RSKernel interpolated(double sigma);
};

struct CheckConfig {
    double tolerance = 1e-10;
    std::uint64_t seed = 0;
    spaces::SearchConfig engine;
};

/// One verdict. For kind == "inequality" the claim is lhs <= C * rhs and
/// pass means margin = C * rhs - lhs >= -tolerance. For kind == "identity"
/// the claim is lhs == rhs and pass means |lhs - rhs| is within tolerance
/// (absolute, with a relative floor at the values' scale).
struct CheckReport {
    std::string check;
    std::string kind = "inequality";
    double lhs = 0.0;
    double rhs = 0.0;
    double constant = 1.0;
    double margin = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string inputs_digest;
    std::uint64_t seed = 0;
};

CheckReport make_inequality_report(std::string check, double lhs, double rhs, double constant,
                                   const CheckConfig& config, std::string digest);
CheckReport make_identity_report(std::string check, double lhs, double rhs,
                                 const CheckConfig& config, std::string digest);

/// Integral form of the summing inequality on simple functions:
///   sum_k mu_k S(u, f_k, g_k) <= C * sup_phi sum_k mu_k R(phi, f_k, g_k).
/// f and g live over the same measure space; f in u's domain, g in the
/// kernel's G space. Probes the kernel's zero conditions on the inputs
/// first and throws InputError if they fail.
CheckReport check_forward_domination(const summing::Operator& u, const vfun::SimpleFunction& f,
                                     const vfun::SimpleFunction& g, const vfun::MeasureSpace& ms,
                                     const RSKernel& kernel, double constant,
                                     const CheckConfig& config = {});

/// Equal-mass-partition construction: places the families on n cells of
/// mass alpha and verifies that both the strong integral and the weak
/// supremum factor exactly into alpha times their discrete forms.
struct ConverseReport {
    CheckReport strong_identity;
    CheckReport weak_identity;
    bool pass() const { return strong_identity.pass && weak_identity.pass; }
};
ConverseReport check_converse_construction(const summing::Operator& u,
                                           const summing::VectorFamily& xs,
                                           const std::vector<Vector>& bs, const RSKernel& kernel,
                                           double alpha, const CheckConfig& config = {});

/// Composition-domination inequality for the interpolated kernel:
///   integral of ||u o f||^(1/(1-sigma))
///     <= C * sup_phi integral of |<f,phi>| ||f||^(sigma/(1-sigma)).
/// Implemented as check_forward_domination with the interpolated kernel
/// and the constant-one companion, so sigma = 0 reproduces the diestel()
/// check bit for bit.
CheckReport check_integrability_improvement(const summing::Operator& u,
                                            const vfun::SimpleFunction& f,
                                            const vfun::MeasureSpace& ms, double sigma,
                                            double constant, const CheckConfig& config = {});

/// Phi_{p,sigma1}(f) <= Phi_{p,sigma2}(f) for sigma1 <= sigma2, both sides
/// evaluated over one shared functional pool.
CheckReport check_phi_monotone(const vfun::SimpleFunction& f, const vfun::MeasureSpace& ms,
                               double p, double sigma1, double sigma2,
                               const CheckConfig& config = {});

/// The identification map from the n-point sup-norm space to the same
/// coordinates under a weighted p-norm (the classical j_p).
summing::Operator make_identification_map(int n, double p, const std::vector<double>& nu);

/// Estimate the p-summing norm of j_p, then drive the composition bound
/// with sigma = 1 - 1/p over a batch of seeded random simple functions,
/// using the estimate (exact total mass for p = 1) as the constant.
struct ScenarioJpReport {
    summing::NormEstimate estimate;
    std::vector<CheckReport> checks;
    bool pass() const {
        for (const CheckReport& c : checks)
            if (!c.pass) return false;
        return true;
    }
};
ScenarioJpReport scenario_jp(int n, double p, const std::vector<double>& nu, int batch,
                             const summing::FamilySearchConfig& search = {},
                             const CheckConfig& config = {});

} // namespace banlab::harness
