#include "banlab/vfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace banlab::vfun {

using spaces::DualBallPool;
using spaces::DualObjective;
using spaces::SearchConfig;

void MeasureSpace::validate() const {
    if (masses.empty()) throw InputError("MeasureSpace: needs at least one cell");
    for (double m : masses)
        if (!(m > 0.0) || !std::isfinite(m))
            throw InputError("MeasureSpace: cell masses must be positive and finite");
}

double MeasureSpace::total() const {
    double t = 0.0;
    for (double m : masses) t += m;
    return t;
}

void SimpleFunction::validate() const {
    space.validate();
    if (values.empty()) throw InputError("SimpleFunction: needs at least one cell value");
    for (const Vector& v : values) require_dim(space, v, "SimpleFunction");
}

SimpleFunction SimpleFunction::constant(const SpaceSpec& space, const Vector& x, int cells) {
    SimpleFunction f;
    f.space = space;
    f.values.assign(static_cast<size_t>(cells), x);
    return f;
}

MeasureSpace equal_mass_partition(int n, double alpha) {
    if (n < 1) throw InputError("equal_mass_partition: n must be >= 1");
    if (!(alpha > 0.0)) throw InputError("equal_mass_partition: alpha must be positive");
    MeasureSpace ms;
    ms.masses.assign(static_cast<size_t>(n), alpha);
    return ms;
}

namespace {

void require_same_cells(const SimpleFunction& f, const MeasureSpace& ms, const char* what) {
    f.validate();
    ms.validate();
    if (f.cells() != ms.cells())
        throw InputError(std::string(what) + ": cell count of function and measure differ");
}

/// Per-cell norms of the values, reused by every norm below.
std::vector<double> cell_norms(const SimpleFunction& f) {
    std::vector<double> out;
    out.reserve(f.values.size());
    for (const Vector& v : f.values) out.push_back(spaces::norm(f.space, v));
    return out;
}

/// Integrand of Phi^p at one functional: sum_k mu_k ||f_k||^(p sigma)
/// |<f_k,phi>|^(p(1-sigma)). std::pow(0,0) == 1 makes sigma = 1 collapse
/// to the Bochner integrand without special-casing.
DualObjective phi_objective(const SimpleFunction& f, const MeasureSpace& ms, double p,
                            double sigma) {
    const std::vector<double> norms = cell_norms(f);
    std::vector<double> coeffs(f.values.size());
    for (size_t k = 0; k < f.values.size(); ++k)
        coeffs[k] = ms.masses[k] * std::pow(norms[k], p * sigma);
    DualObjective obj =
        spaces::make_power_sum_objective(f.space, f.values, coeffs, p * (1.0 - sigma));
    obj.convex_in_phi = p * (1.0 - sigma) >= 1.0 || sigma == 1.0;
    return obj;
}

/// Engine budget used by the function norms: on an enumerable polytope
/// dual the extreme points already form the full evaluation set, so the
/// seeded ascent is skipped there (see phi_norm's contract).
SearchConfig norm_engine_config(const SpaceSpec& space, SearchConfig config) {
    const bool polytope = space.exponent == 1.0 || space.is_infinity();
    const bool enumerable = space.is_infinity() || space.dim <= config.enum_cap;
    if (polytope && enumerable) config.multistarts = 0;
    return config;
}

} // namespace

double pettis_norm(const SimpleFunction& f, const MeasureSpace& ms, double p,
                   const SearchConfig& config) {
    require_same_cells(f, ms, "pettis_norm");
    if (!(p >= 1.0)) throw InputError("pettis_norm: p must be >= 1");
    const DualObjective obj = phi_objective(f, ms, p, 0.0);
    const SearchConfig cfg = norm_engine_config(f.space, config);
    return std::pow(spaces::sup_convex_over_dual_ball(f.space, obj, cfg).value, 1.0 / p);
}

double bochner_norm(const SimpleFunction& f, const MeasureSpace& ms, double p) {
    require_same_cells(f, ms, "bochner_norm");
    if (!(p >= 1.0)) throw InputError("bochner_norm: p must be >= 1");
    const std::vector<double> norms = cell_norms(f);
    double s = 0.0;
    for (size_t k = 0; k < norms.size(); ++k)
        s += ms.masses[k] * std::pow(norms[k], p);
    return std::pow(s, 1.0 / p);
}

double phi_norm(const SimpleFunction& f, const MeasureSpace& ms, double p, double sigma,
                const SearchConfig& config) {
    require_same_cells(f, ms, "phi_norm");
    if (!(p >= 1.0)) throw InputError("phi_norm: p must be >= 1");
    if (!(sigma >= 0.0) || sigma > 1.0)
        throw InputError("phi_norm: sigma must lie in [0, 1]");
    if (sigma == 1.0) return bochner_norm(f, ms, p);
    const DualObjective obj = phi_objective(f, ms, p, sigma);
    const SearchConfig cfg = norm_engine_config(f.space, config);
    return std::pow(spaces::sup_convex_over_dual_ball(f.space, obj, cfg).value, 1.0 / p);
}

std::vector<double> phi_norm_grid(const SimpleFunction& f, const MeasureSpace& ms, double p,
                                  const std::vector<double>& sigmas,
                                  const SearchConfig& config) {
    require_same_cells(f, ms, "phi_norm_grid");
    if (!(p >= 1.0)) throw InputError("phi_norm_grid: p must be >= 1");
    if (sigmas.empty()) throw InputError("phi_norm_grid: sigma grid is empty");
    for (double s : sigmas)
        if (!(s >= 0.0) || s > 1.0) throw InputError("phi_norm_grid: sigma must lie in [0, 1]");

    std::vector<DualObjective> objectives;
    objectives.reserve(sigmas.size());
    for (double s : sigmas) objectives.push_back(phi_objective(f, ms, p, s));
    std::vector<const DualObjective*> ptrs;
    for (const DualObjective& o : objectives) ptrs.push_back(&o);

    const SearchConfig cfg = norm_engine_config(f.space, config);
    const DualBallPool pool = spaces::build_dual_ball_pool(f.space, ptrs, cfg);
    std::vector<double> out;
    out.reserve(sigmas.size());
    for (const DualObjective& o : objectives)
        out.push_back(std::pow(spaces::evaluate_max(pool, o).value, 1.0 / p));
    return out;
}

namespace {

/// Phi^p contributions per (pool point, cell), so partition pieces can be
/// scored by summing columns.
struct PhiTermTable {
    std::vector<std::vector<double>> terms;  // [pool point][cell]
    size_t pool_size() const { return terms.size(); }

    double piece_value(const std::vector<int>& cells, double p) const {
        double best = 0.0;
        for (const auto& row : terms) {
            double s = 0.0;
            for (int k : cells) s += row[static_cast<size_t>(k)];
            best = std::max(best, s);
        }
        return std::pow(best, 1.0 / p);
    }
};

PhiTermTable build_phi_terms(const SimpleFunction& f, const MeasureSpace& ms, double p,
                             double sigma, const SearchConfig& config) {
    const DualObjective obj = phi_objective(f, ms, p, sigma);
    const SearchConfig cfg = norm_engine_config(f.space, config);
    const DualBallPool pool = spaces::build_dual_ball_pool(f.space, {&obj}, cfg);

    const std::vector<double> norms = cell_norms(f);
    const double pairing_power = p * (1.0 - sigma);
    PhiTermTable table;
    table.terms.reserve(pool.points.size());
    for (const Functional& phi : pool.points) {
        std::vector<double> row(f.values.size());
        for (size_t k = 0; k < f.values.size(); ++k) {
            const double t = std::abs(spaces::dual_pair(f.values[k], phi));
            row[k] = ms.masses[k] * std::pow(norms[k], p * sigma) * std::pow(t, pairing_power);
        }
        table.terms.push_back(std::move(row));
    }
    return table;
}

double partition_value(const PhiTermTable& table, const std::vector<std::vector<int>>& pieces,
                       double p) {
    double total = 0.0;
    for (const auto& piece : pieces) total += table.piece_value(piece, p);
    return total;
}

/// Enumerates set partitions via restricted growth strings.
double best_partition_exhaustive(const PhiTermTable& table, int cells, double p) {
    std::vector<int> assign(static_cast<size_t>(cells), 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        int blocks = 0;
        for (int a : assign) blocks = std::max(blocks, a + 1);
        std::vector<std::vector<int>> pieces(static_cast<size_t>(blocks));
        for (int k = 0; k < cells; ++k)
            pieces[static_cast<size_t>(assign[static_cast<size_t>(k)])].push_back(k);
        best = std::min(best, partition_value(table, pieces, p));

        // Next restricted growth string.
        int i = cells - 1;
        while (i > 0) {
            int maxprefix = 0;
            for (int j = 0; j < i; ++j) maxprefix = std::max(maxprefix, assign[static_cast<size_t>(j)]);
            if (assign[static_cast<size_t>(i)] <= maxprefix) break;
            --i;
        }
        if (i == 0) break;
        ++assign[static_cast<size_t>(i)];
        for (int j = i + 1; j < cells; ++j) assign[static_cast<size_t>(j)] = 0;
    }
    return best;
}

/// Greedy pairwise merging from the finest partition down to the single
/// piece, keeping the best value seen. Merging a pair never increases the
/// total (the piece score is subadditive over disjoint cells), so the walk
/// always reaches the full merge; ties are merged rather than treated as a
/// stopping condition.
double best_partition_greedy(const PhiTermTable& table, int cells, double p) {
    std::vector<std::vector<int>> pieces;
    for (int k = 0; k < cells; ++k) pieces.push_back({k});
    double best = partition_value(table, pieces, p);
    while (pieces.size() > 1) {
        double best_delta = -std::numeric_limits<double>::infinity();
        size_t best_a = 0, best_b = 1;
        for (size_t a = 0; a < pieces.size(); ++a) {
            for (size_t b = a + 1; b < pieces.size(); ++b) {
                std::vector<int> merged = pieces[a];
                merged.insert(merged.end(), pieces[b].begin(), pieces[b].end());
                const double delta = table.piece_value(pieces[a], p) +
                                     table.piece_value(pieces[b], p) -
                                     table.piece_value(merged, p);
                if (delta > best_delta) {
                    best_delta = delta;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        pieces[best_a].insert(pieces[best_a].end(), pieces[best_b].begin(), pieces[best_b].end());
        pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(best_b));
        best = std::min(best, partition_value(table, pieces, p));
    }
    return best;
}

} // namespace

summing::NormEstimate convexified_norm_upper(const SimpleFunction& f, const MeasureSpace& ms,
                                             double p, double sigma,
                                             const DecompositionSearchConfig& config) {
    require_same_cells(f, ms, "convexified_norm_upper");
    if (!(p >= 1.0)) throw InputError("convexified_norm_upper: p must be >= 1");
    if (!(sigma >= 0.0) || sigma > 1.0)
        throw InputError("convexified_norm_upper: sigma must lie in [0, 1]");

    const PhiTermTable table = build_phi_terms(f, ms, p, sigma, config.engine);
    const int cells = f.cells();
    summing::NormEstimate est;
    est.certification = summing::Certification::upper_bound;
    est.diagnostics.seed = config.engine.seed;
    est.value = cells <= config.exhaustive_cells
                    ? best_partition_exhaustive(table, cells, p)
                    : best_partition_greedy(table, cells, p);
    return est;
}

SimpleFunction compose(const summing::Operator& u, const SimpleFunction& f) {
    u.validate();
    f.validate();
    if (!(f.space == u.domain))
        throw InputError("compose: function space does not match operator domain");
    SimpleFunction g;
    g.space = u.codomain;
    g.values.reserve(f.values.size());
    for (const Vector& v : f.values) g.values.push_back(u.apply(v));
    return g;
}

std::pair<MeasureSpace, SimpleFunction> refine(const MeasureSpace& ms, const SimpleFunction& f,
                                               int k) {
    require_same_cells(f, ms, "refine");
    if (k < 2) throw InputError("refine: k must be >= 2");
    MeasureSpace rms;
    SimpleFunction rf;
    rf.space = f.space;
    rms.masses.reserve(ms.masses.size() * static_cast<size_t>(k));
    rf.values.reserve(f.values.size() * static_cast<size_t>(k));
    for (size_t c = 0; c < ms.masses.size(); ++c) {
        const double sub = ms.masses[c] / static_cast<double>(k);
        for (int i = 0; i < k; ++i) {
            rms.masses.push_back(sub);
            rf.values.push_back(f.values[c]);
        }
    }
    return {std::move(rms), std::move(rf)};
}

} // namespace banlab::vfun
