#pragma once

#include <utility>
#include <vector>

#include "banlab/spaces.hpp"
#include "banlab/summing.hpp"
#include "banlab/types.hpp"

namespace banlab::vfun {

/// Finite partition with positive cell masses. Stands in for a non-atomic
/// measure space: refine() splits cells arbitrarily finely.
struct MeasureSpace {
    std::vector<double> masses;

    void validate() const;
    int cells() const { return static_cast<int>(masses.size()); }
    double total() const;
};

/// Cellwise-constant function with values in one space; cell k of the
/// associated MeasureSpace carries the value values[k].
struct SimpleFunction {
    SpaceSpec space;
    std::vector<Vector> values;

    void validate() const;
    int cells() const { return static_cast<int>(values.size()); }

    static SimpleFunction constant(const SpaceSpec& space, const Vector& x, int cells);
};

/// n cells of equal mass alpha.
MeasureSpace equal_mass_partition(int n, double alpha);

/// sup over the dual ball of (sum_k mu_k |<f_k, phi>|^p)^(1/p).
double pettis_norm(const SimpleFunction& f, const MeasureSpace& ms, double p,
                   const spaces::SearchConfig& config = {});

/// (sum_k mu_k ||f_k||^p)^(1/p).
double bochner_norm(const SimpleFunction& f, const MeasureSpace& ms, double p);

/// sup over the dual ball of
/// (sum_k mu_k (|<f_k,phi>|^(1-sigma) ||f_k||^sigma)^p)^(1/p).
/// sigma = 0 is the Pettis norm, sigma = 1 the Bochner norm. On polytope
/// duals the value is the maximum over the ball's extreme points, which is
/// the exact supremum whenever p(1-sigma) >= 1; ascent is not run there,
/// so values at different sigma are evaluated over the same point set and
/// compare cleanly.
double phi_norm(const SimpleFunction& f, const MeasureSpace& ms, double p, double sigma,
                const spaces::SearchConfig& config = {});

/// phi_norm over a sigma grid, all values taken over one shared candidate
/// pool. The returned column is nondecreasing in sigma by construction
/// whenever the grid is sorted.
std::vector<double> phi_norm_grid(const SimpleFunction& f, const MeasureSpace& ms, double p,
                                  const std::vector<double>& sigmas,
                                  const spaces::SearchConfig& config = {});

struct DecompositionSearchConfig {
    int exhaustive_cells = 10;  // set-partition enumeration up to this many cells
    spaces::SearchConfig engine;
};

/// Upper bound on the decomposition norm inf { sum_i Phi(f_i) : f = sum f_i },
/// searching decompositions into pieces supported on disjoint cell sets
/// (exhaustive set-partition enumeration for small cell counts, greedy
/// merging above). Always certified as an upper bound; the value never
/// drops below the Pettis norm nor above Phi of the whole function.
summing::NormEstimate convexified_norm_upper(const SimpleFunction& f, const MeasureSpace& ms,
                                             double p, double sigma,
                                             const DecompositionSearchConfig& config = {});

/// Cellwise image: (u of)(w) = u(f(w)).
SimpleFunction compose(const summing::Operator& u, const SimpleFunction& f);

/// Splits every cell into k equal-mass subcells, copying values; the total
/// mass and all four function norms are unchanged.
std::pair<MeasureSpace, SimpleFunction> refine(const MeasureSpace& ms, const SimpleFunction& f,
                                               int k);

} // namespace banlab::vfun
