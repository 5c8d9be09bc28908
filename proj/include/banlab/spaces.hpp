#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "banlab/types.hpp"

namespace banlab::spaces {

/// Weighted l_p norm of x in the given space.
double norm(const SpaceSpec& space, const Vector& x);

/// Duality pairing <x, phi> = sum_j x_j phi_j.
double dual_pair(const Vector& x, const Functional& phi);

/// Norm of phi in the dual space (dual exponent, reciprocal weights).
double dual_norm(const SpaceSpec& space, const Functional& phi);

/// A functional of dual norm 1 with <x, phi> = norm(space, x).
/// Returns the zero functional for x = 0.
Functional norming_functional(const SpaceSpec& space, const Vector& x);

/// Objective to maximize over the dual unit ball. The engine treats the
/// convexity flag as a caller-supplied theorem: extreme-point enumeration
/// certifies the maximum only when it is set.
struct DualObjective {
    std::function<double(const Functional&)> value;
    /// Optional analytic gradient; central differences are used otherwise.
    std::function<Functional(const Functional&)> gradient;
    bool convex_in_phi = false;
    /// Known good start points (norming functionals, spectral witnesses, ...).
    /// They are rescaled onto the dual sphere before use.
    std::vector<Functional> hint_starts;
};

struct SearchConfig {
    std::uint64_t seed = 0;
    int multistarts = 64;        // ascent starts; 0 disables ascent
    int max_iters = 10000;
    double improve_tol = 1e-12;  // stop when a step gains less than this
    double initial_step = 0.1;   // step length before backtracking
    int enum_cap = 20;           // max dim for 2^n sign-vertex enumeration
    bool require_certified = false;  // error instead of falling back
};

struct SupResult {
    double value = 0.0;
    Functional witness;
    bool certified = false;
};

/// Candidate functionals on the dual sphere over which objectives are
/// evaluated. Inequalities between objectives that hold pointwise in phi
/// survive evaluation on a shared pool, which is what the comparison
/// checks in the other modules rely on.
struct DualBallPool {
    std::vector<Functional> points;
    bool exhaustive = false;  // contains every extreme point of the ball
};

/// Extreme points of the dual unit ball: 2n points +-w_j e_j for primal
/// exponent inf, the 2^n corners (+-w_1, ..., +-w_n) for primal exponent 1.
/// Throws InputError for smooth exponents or when 2^dim exceeds the cap.
std::vector<Functional> dual_ball_extreme_points(const SpaceSpec& space, int enum_cap = 20);

/// Builds a candidate pool for the given objectives: extreme points where
/// the dual ball is a polytope within the enumeration cap, hint starts,
/// and the end points of multistart ascent runs (one batch per objective).
DualBallPool build_dual_ball_pool(const SpaceSpec& space,
                                  const std::vector<const DualObjective*>& objectives,
                                  const SearchConfig& config);

/// Maximum of the objective over the pool with deterministic tie-breaking
/// (lexicographically smallest witness among equal values).
SupResult evaluate_max(const DualBallPool& pool, const DualObjective& objective);

/// sup of a convex objective over the dual unit ball. Exact and certified
/// when the ball is a polytope within the enumeration cap and the
/// convexity flag is set; a seeded multistart lower bound otherwise.
SupResult sup_convex_over_dual_ball(const SpaceSpec& space, const DualObjective& objective,
                                    const SearchConfig& config = {});

/// Objective phi -> sum_i coeffs_i |<vectors_i, phi>|^power, the workhorse
/// shape behind every weak/mixed/scalarization supremum here. Convex for
/// power >= 1. Hints: norming functionals of the vectors, plus the top
/// eigenvector of the weighted Gram matrix when power == 2 on an
/// exponent-2 space (that case is the exact spectral maximum).
DualObjective make_power_sum_objective(const SpaceSpec& space, const std::vector<Vector>& vectors,
                                       const std::vector<double>& coeffs, double power);

/// sup over the dual ball of sum_i c_i <x_i, phi>^2 on an exponent-2
/// space: exactly the top eigenvalue of the weighted Gram matrix.
/// (value, witness); empty for other exponents.
std::optional<SupResult> quadratic_sup_exact(const SpaceSpec& space,
                                             const std::vector<Vector>& vectors,
                                             const std::vector<double>& coeffs);

} // namespace banlab::spaces
