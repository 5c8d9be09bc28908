#include "banlab/summing.hpp"

#include <algorithm>
#include <cmath>

#include "banlab/rng.hpp"

namespace banlab::summing {

using spaces::DualBallPool;
using spaces::DualObjective;
using spaces::SearchConfig;

void Operator::validate() const {
    domain.validate();
    codomain.validate();
    if (static_cast<int>(matrix.size()) != codomain.dim)
        throw InputError("Operator: row count does not match codomain dim");
    for (const auto& row : matrix)
        if (static_cast<int>(row.size()) != domain.dim)
            throw InputError("Operator: column count does not match domain dim");
}

Vector Operator::apply(const Vector& x) const {
    require_dim(domain, x, "Operator::apply");
    Vector y = Vector::zero(codomain.dim);
    for (int i = 0; i < codomain.dim; ++i) {
        double s = 0.0;
        for (int j = 0; j < domain.dim; ++j)
            s += matrix[static_cast<size_t>(i)][static_cast<size_t>(j)] * x[j];
        y[i] = s;
    }
    return y;
}

Operator Operator::identity(const SpaceSpec& space) {
    Operator T;
    T.domain = space;
    T.codomain = space;
    T.matrix.assign(static_cast<size_t>(space.dim),
                    std::vector<double>(static_cast<size_t>(space.dim), 0.0));
    for (int j = 0; j < space.dim; ++j)
        T.matrix[static_cast<size_t>(j)][static_cast<size_t>(j)] = 1.0;
    return T;
}

Operator Operator::zero(const SpaceSpec& domain, const SpaceSpec& codomain) {
    Operator T;
    T.domain = domain;
    T.codomain = codomain;
    T.matrix.assign(static_cast<size_t>(codomain.dim),
                    std::vector<double>(static_cast<size_t>(domain.dim), 0.0));
    return T;
}

Operator Operator::diagonal(const SpaceSpec& space, const std::vector<double>& diag) {
    if (static_cast<int>(diag.size()) != space.dim)
        throw InputError("Operator::diagonal: size mismatch");
    Operator T = zero(space, space);
    for (int j = 0; j < space.dim; ++j)
        T.matrix[static_cast<size_t>(j)][static_cast<size_t>(j)] = diag[static_cast<size_t>(j)];
    return T;
}

void VectorFamily::validate() const {
    space.validate();
    if (vectors.empty())
        throw InputError("VectorFamily: must contain at least one vector");
    for (const Vector& x : vectors) require_dim(space, x, "VectorFamily");
}

bool VectorFamily::all_zero() const {
    for (const Vector& x : vectors)
        for (double c : x.coords)
            if (c != 0.0) return false;
    return true;
}

void SummingParams::validate() const {
    if (!(p >= 1.0) || std::isinf(p))
        throw InputError("SummingParams: p must be finite and >= 1");
    if (kind == SummingKind::pq_summing && (!(q >= 1.0) || q > p))
        throw InputError("SummingParams: q must satisfy 1 <= q <= p");
    if (kind == SummingKind::p_sigma && (!(sigma >= 0.0) || sigma >= 1.0))
        throw InputError("SummingParams: sigma must satisfy 0 <= sigma < 1");
}

double SummingParams::strong_exponent() const {
    return kind == SummingKind::p_sigma ? p / (1.0 - sigma) : p;
}

std::string to_string(Certification c) {
    switch (c) {
        case Certification::exact: return "exact";
        case Certification::lower_bound: return "lower_bound";
        case Certification::upper_bound: return "upper_bound";
    }
    return "unknown";
}

std::string to_string(SummingKind k) {
    switch (k) {
        case SummingKind::p_summing: return "p_summing";
        case SummingKind::pq_summing: return "pq_summing";
        case SummingKind::p_sigma: return "p_sigma";
    }
    return "unknown";
}

double strong_power_sum(const Operator& T, const VectorFamily& fam, double r) {
    T.validate();
    fam.validate();
    if (!(fam.space == T.domain))
        throw InputError("strong_power_sum: family space does not match operator domain");
    if (!(r >= 1.0)) throw InputError("strong_power_sum: r must be >= 1");
    double s = 0.0;
    for (const Vector& x : fam.vectors)
        s += std::pow(spaces::norm(T.codomain, T.apply(x)), r);
    return std::pow(s, 1.0 / r);
}

namespace {

DualObjective weak_objective(const VectorFamily& fam, double r) {
    std::vector<double> ones(fam.vectors.size(), 1.0);
    return spaces::make_power_sum_objective(fam.space, fam.vectors, ones, r);
}

DualObjective mixed_objective(const VectorFamily& fam, double p, double sigma) {
    std::vector<double> coeffs;
    coeffs.reserve(fam.vectors.size());
    for (const Vector& x : fam.vectors)
        coeffs.push_back(std::pow(spaces::norm(fam.space, x), p * sigma / (1.0 - sigma)));
    return spaces::make_power_sum_objective(fam.space, fam.vectors, coeffs, p);
}

} // namespace

double weak_power_sup(const VectorFamily& fam, double r, const SearchConfig& config) {
    fam.validate();
    if (!(r >= 1.0)) throw InputError("weak_power_sup: r must be >= 1");
    if (r == 2.0 && fam.space.exponent == 2.0) {
        std::vector<double> ones(fam.vectors.size(), 1.0);
        if (auto spectral = spaces::quadratic_sup_exact(fam.space, fam.vectors, ones))
            return std::sqrt(spectral->value);
    }
    const DualObjective obj = weak_objective(fam, r);
    return std::pow(spaces::sup_convex_over_dual_ball(fam.space, obj, config).value, 1.0 / r);
}

double mixed_power_sup(const VectorFamily& fam, double p, double sigma,
                       const SearchConfig& config) {
    fam.validate();
    if (!(p >= 1.0)) throw InputError("mixed_power_sup: p must be >= 1");
    if (!(sigma >= 0.0) || sigma >= 1.0)
        throw InputError("mixed_power_sup: sigma must satisfy 0 <= sigma < 1");
    if (p == 2.0 && fam.space.exponent == 2.0) {
        std::vector<double> coeffs;
        coeffs.reserve(fam.vectors.size());
        for (const Vector& x : fam.vectors)
            coeffs.push_back(std::pow(spaces::norm(fam.space, x), 2.0 * sigma / (1.0 - sigma)));
        if (auto spectral = spaces::quadratic_sup_exact(fam.space, fam.vectors, coeffs))
            return std::pow(spectral->value, (1.0 - sigma) / 2.0);
    }
    const DualObjective obj = mixed_objective(fam, p, sigma);
    return std::pow(spaces::sup_convex_over_dual_ball(fam.space, obj, config).value,
                    (1.0 - sigma) / p);
}

double summing_ratio(const Operator& T, const VectorFamily& fam, const SummingParams& params,
                     const SearchConfig& config) {
    params.validate();
    VectorFamily clean = fam;
    clean.validate();
    // Zero vectors contribute nothing to either side; drop them so they
    // cannot manufacture a degenerate denominator.
    std::erase_if(clean.vectors, [](const Vector& x) {
        return std::all_of(x.coords.begin(), x.coords.end(), [](double c) { return c == 0.0; });
    });
    if (clean.vectors.empty())
        throw InputError("summing_ratio: family has no nonzero vector");

    double weak = 0.0;
    switch (params.kind) {
        case SummingKind::p_summing:
            weak = weak_power_sup(clean, params.p, config);
            break;
        case SummingKind::pq_summing:
            weak = weak_power_sup(clean, params.q, config);
            break;
        case SummingKind::p_sigma:
            weak = mixed_power_sup(clean, params.p, params.sigma, config);
            break;
    }
    if (weak <= 0.0)
        throw InputError("summing_ratio: weak side vanished on a nonzero family");
    return strong_power_sum(T, clean, params.strong_exponent()) / weak;
}

ChainValues summing_chain(const VectorFamily& fam, double p, double sigma,
                          const SearchConfig& config) {
    fam.validate();
    if (!(p >= 1.0)) throw InputError("summing_chain: p must be >= 1");
    if (!(sigma >= 0.0) || sigma >= 1.0)
        throw InputError("summing_chain: sigma must satisfy 0 <= sigma < 1");

    const DualObjective interp = weak_objective(fam, p / (1.0 - sigma));
    const DualObjective mixed = mixed_objective(fam, p, sigma);
    const DualObjective base = weak_objective(fam, p);
    const DualBallPool pool =
        spaces::build_dual_ball_pool(fam.space, {&interp, &mixed, &base}, config);

    ChainValues out;
    out.weak_interpolated =
        std::pow(spaces::evaluate_max(pool, interp).value, (1.0 - sigma) / p);
    out.mixed = std::pow(spaces::evaluate_max(pool, mixed).value, (1.0 - sigma) / p);
    out.weak_base = std::pow(spaces::evaluate_max(pool, base).value, 1.0 / p);
    double m = 0.0;
    for (const Vector& x : fam.vectors) m = std::max(m, spaces::norm(fam.space, x));
    out.max_norm_sigma = std::pow(m, sigma);
    return out;
}

double hilbert_schmidt_norm(const Operator& T) {
    T.validate();
    if (T.domain.exponent != 2.0 || T.codomain.exponent != 2.0 ||
        !T.domain.has_unit_weights() || !T.codomain.has_unit_weights())
        throw InputError("hilbert_schmidt_norm: requires unit-weight exponent-2 spaces");
    double s = 0.0;
    for (const auto& row : T.matrix)
        for (double v : row) s += v * v;
    return std::sqrt(s);
}

std::optional<double> identification_map_exact_norm(const Operator& T,
                                                    const SummingParams& params) {
    if (params.kind != SummingKind::p_summing || params.p != 1.0) return std::nullopt;
    if (!T.domain.is_infinity() || !T.domain.has_unit_weights()) return std::nullopt;
    if (T.codomain.exponent != 1.0 || T.codomain.dim != T.domain.dim) return std::nullopt;
    for (int i = 0; i < T.codomain.dim; ++i)
        for (int j = 0; j < T.domain.dim; ++j) {
            const double expect = i == j ? 1.0 : 0.0;
            if (T.matrix[static_cast<size_t>(i)][static_cast<size_t>(j)] != expect)
                return std::nullopt;
        }
    double total = 0.0;
    for (int j = 0; j < T.codomain.dim; ++j) total += T.codomain.weight(j);
    return total;
}

namespace {

bool operator_is_zero(const Operator& T) {
    for (const auto& row : T.matrix)
        for (double v : row)
            if (v != 0.0) return false;
    return true;
}

/// Ratio of a candidate family, or 0 when degenerate.
double safe_ratio(const Operator& T, const VectorFamily& fam, const SummingParams& params,
                  const SearchConfig& engine) {
    if (fam.vectors.empty() || fam.all_zero()) return 0.0;
    return summing_ratio(T, fam, params, engine);
}

bool family_less(const VectorFamily& a, const VectorFamily& b) {
    if (a.vectors.size() != b.vectors.size()) return a.vectors.size() < b.vectors.size();
    for (size_t i = 0; i < a.vectors.size(); ++i)
        if (!(a.vectors[i] == b.vectors[i])) return a.vectors[i].coords < b.vectors[i].coords;
    return false;
}

/// Perturb one coordinate of one vector at a time, keeping changes that
/// improve the ratio, with step halving.
double local_ascent(const Operator& T, VectorFamily& fam, const SummingParams& params,
                    const FamilySearchConfig& config, long long& iterations) {
    double best = safe_ratio(T, fam, params, config.dual_ball);
    double step = config.initial_step;
    for (int sweep = 0; sweep < config.ascent_sweeps; ++sweep) {
        bool improved = false;
        for (size_t i = 0; i < fam.vectors.size(); ++i) {
            for (int j = 0; j < fam.space.dim; ++j) {
                for (double dir : {1.0, -1.0}) {
                    VectorFamily trial = fam;
                    trial.vectors[i][j] += dir * step;
                    const double v = safe_ratio(T, trial, params, config.dual_ball);
                    ++iterations;
                    if (v > best * (1.0 + config.improve_tol)) {
                        best = v;
                        fam = std::move(trial);
                        improved = true;
                        break;
                    }
                }
            }
        }
        if (!improved) {
            step *= 0.5;
            if (step < 1e-6) break;
        }
    }
    return best;
}

} // namespace

NormEstimate estimate_ideal_norm_lower(const Operator& T, const SummingParams& params,
                                       const FamilySearchConfig& config) {
    T.validate();
    params.validate();

    NormEstimate est;
    est.diagnostics.seed = config.seed;
    est.diagnostics.restarts = config.restarts;

    if (operator_is_zero(T)) {
        est.value = 0.0;
        est.certification = Certification::exact;
        est.diagnostics.oracle = "zero_operator";
        return est;
    }

    if (config.use_oracles && params.kind == SummingKind::p_summing && params.p == 2.0 &&
        T.domain.exponent == 2.0 && T.codomain.exponent == 2.0 && T.domain.has_unit_weights() &&
        T.codomain.has_unit_weights()) {
        est.value = hilbert_schmidt_norm(T);
        est.certification = Certification::exact;
        est.diagnostics.oracle = "hilbert_schmidt";
    } else if (config.use_oracles) {
        if (auto exact = identification_map_exact_norm(T, params)) {
            est.value = *exact;
            est.certification = Certification::exact;
            est.diagnostics.oracle = "identification_map_total_mass";
        }
    }

    const int n = T.domain.dim;
    double best = 0.0;
    VectorFamily best_family;
    long long iterations = 0;
    SearchConfig engine = config.dual_ball;
    engine.seed = rng::derive(config.seed, 0xb001);

    auto consider = [&](VectorFamily fam) {
        FamilySearchConfig ascent_cfg = config;
        ascent_cfg.dual_ball = engine;
        const double value = local_ascent(T, fam, params, ascent_cfg, iterations);
        if (value > best ||
            (value == best && (best_family.vectors.empty() || family_less(fam, best_family)))) {
            best = value;
            best_family = std::move(fam);
        }
    };

    // Canonical candidates: the coordinate basis and the constant-ones
    // vector witness the known extremal families for the diagonal cases.
    {
        VectorFamily basis{T.domain, {}};
        for (int j = 0; j < n; ++j) basis.vectors.push_back(Vector::unit(n, j));
        consider(basis);
        VectorFamily ones{T.domain, {Vector(std::vector<double>(static_cast<size_t>(n), 1.0))}};
        consider(ones);
    }

    for (int restart = 0; restart < config.restarts; ++restart) {
        rng::Stream stream(rng::derive(config.seed, static_cast<std::uint64_t>(restart) + 1));
        const int size = 1 + static_cast<int>(stream.below(static_cast<std::uint64_t>(
                                 std::max(1, config.max_family))));
        VectorFamily fam{T.domain, {}};
        for (int i = 0; i < size; ++i) {
            Vector x = Vector::zero(n);
            for (int j = 0; j < n; ++j) x[j] = stream.normal();
            fam.vectors.push_back(std::move(x));
        }
        if (fam.all_zero()) continue;
        consider(std::move(fam));
    }

    est.diagnostics.iterations = iterations;
    est.diagnostics.best_family = best_family;
    if (est.certification != Certification::exact) {
        est.value = best;
        est.certification = Certification::lower_bound;
    }
    return est;
}

} // namespace banlab::summing
