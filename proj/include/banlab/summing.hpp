#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "banlab/spaces.hpp"
#include "banlab/types.hpp"

namespace banlab::summing {

/// Linear operator between two spaces, stored as a dense
/// dim_out x dim_in matrix in row-major order.
struct Operator {
    std::vector<std::vector<double>> matrix;
    SpaceSpec domain;
    SpaceSpec codomain;

    void validate() const;
    Vector apply(const Vector& x) const;

    static Operator identity(const SpaceSpec& space);
    static Operator zero(const SpaceSpec& domain, const SpaceSpec& codomain);
    static Operator diagonal(const SpaceSpec& space, const std::vector<double>& diag);
};

/// Finite family x_1, ..., x_n in a common space.
struct VectorFamily {
    SpaceSpec space;
    std::vector<Vector> vectors;

    void validate() const;
    bool all_zero() const;
};

enum class SummingKind { p_summing, pq_summing, p_sigma };

struct SummingParams {
    SummingKind kind = SummingKind::p_summing;
    double p = 1.0;
    double q = 1.0;      // used by pq_summing, must satisfy 1 <= q <= p
    double sigma = 0.0;  // used by p_sigma, must satisfy 0 <= sigma < 1

    void validate() const;
    /// Exponent on the strong side: p, or p/(1-sigma) for the p_sigma kind.
    double strong_exponent() const;
};

enum class Certification { exact, lower_bound, upper_bound };

std::string to_string(Certification c);
std::string to_string(SummingKind k);

struct SearchDiagnostics {
    std::uint64_t seed = 0;
    int restarts = 0;
    long long iterations = 0;
    std::optional<VectorFamily> best_family;
    std::string oracle;  // name of the oracle that produced an exact value, if any
};

struct NormEstimate {
    double value = 0.0;
    Certification certification = Certification::lower_bound;
    SearchDiagnostics diagnostics;
};

/// (sum_i ||T x_i||^r)^(1/r) in the codomain norm.
double strong_power_sum(const Operator& T, const VectorFamily& fam, double r);

/// sup over the dual unit ball of (sum_i |<x_i, phi>|^r)^(1/r).
double weak_power_sup(const VectorFamily& fam, double r,
                      const spaces::SearchConfig& config = {});

/// sup over the dual ball of
/// (sum_i (|<x_i,phi>|^(1-sigma) ||x_i||^sigma)^(p/(1-sigma)))^((1-sigma)/p).
/// The inner function of phi is sum_i c_i |<x_i,phi>|^p with constants
/// c_i = ||x_i||^(p sigma/(1-sigma)), so it stays convex in phi.
double mixed_power_sup(const VectorFamily& fam, double p, double sigma,
                       const spaces::SearchConfig& config = {});

/// Strong-to-weak ratio for the given params; the supremum of this ratio
/// over all finite families is the corresponding ideal norm.
double summing_ratio(const Operator& T, const VectorFamily& fam, const SummingParams& params,
                     const spaces::SearchConfig& config = {});

/// The three displayed quantities of the pointwise inclusion chain between
/// the weak, mixed, and base power suprema, evaluated on one shared
/// functional pool so the chain inequalities survive restricted evaluation:
///   weak_interpolated <= mixed <= max_norm_sigma * weak_base^(1-sigma) <= weak_base.
struct ChainValues {
    double weak_interpolated = 0.0;  // weak power sup at exponent p/(1-sigma)
    double mixed = 0.0;              // mixed power sup at (p, sigma)
    double weak_base = 0.0;          // weak power sup at exponent p
    double max_norm_sigma = 0.0;     // max_i ||x_i||^sigma
};
ChainValues summing_chain(const VectorFamily& fam, double p, double sigma,
                          const spaces::SearchConfig& config = {});

struct FamilySearchConfig {
    std::uint64_t seed = 0;
    int restarts = 256;
    int max_family = 8;
    int ascent_sweeps = 4;       // coordinate-perturbation passes per restart
    double initial_step = 0.5;
    double improve_tol = 1e-9;   // relative; stop a restart below this gain
    bool use_oracles = true;
    spaces::SearchConfig dual_ball;  // engine budget for the weak/mixed sups
};

/// Best summing ratio found over seeded random families plus canonical
/// candidates (basis and constant-ones families), with coordinate-wise
/// local ascent. Certification is lower_bound unless an exact oracle
/// applies and oracles are enabled.
NormEstimate estimate_ideal_norm_lower(const Operator& T, const SummingParams& params,
                                       const FamilySearchConfig& config = {});

/// Square root of the sum of squared matrix entries; equals the 2-summing
/// norm for operators between unit-weight exponent-2 spaces, which is the
/// only case it accepts.
double hilbert_schmidt_norm(const Operator& T);

/// Exact 1-summing norm of the identification map from an unweighted
/// sup-norm space onto the same coordinates with a weighted 1-norm:
/// the total codomain mass. Empty when T is not of that shape.
std::optional<double> identification_map_exact_norm(const Operator& T, const SummingParams& params);

} // namespace banlab::summing
