#include "banlab/spaces.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>

#include "banlab/rng.hpp"

namespace banlab::spaces {

namespace {

double sgn(double t) { return t < 0.0 ? -1.0 : 1.0; }

/// Dual exponent p' with 1/p + 1/p' = 1.
double conjugate_exponent(double p) {
    if (std::isinf(p)) return 1.0;
    if (p == 1.0) return kInfExponent;
    return p / (p - 1.0);
}

} // namespace

double norm(const SpaceSpec& space, const Vector& x) {
    space.validate();
    require_dim(space, x, "norm");
    if (space.is_infinity()) {
        double m = 0.0;
        for (int j = 0; j < space.dim; ++j)
            m = std::max(m, space.weight(j) * std::abs(x[j]));
        return m;
    }
    const double p = space.exponent;
    double s = 0.0;
    for (int j = 0; j < space.dim; ++j)
        s += space.weight(j) * std::pow(std::abs(x[j]), p);
    return std::pow(s, 1.0 / p);
}

double dual_pair(const Vector& x, const Functional& phi) {
    if (x.dim() != phi.dim())
        throw InputError("dual_pair: dimension mismatch");
    double s = 0.0;
    for (int j = 0; j < x.dim(); ++j)
        s += x[j] * phi[j];
    return s;
}

double dual_norm(const SpaceSpec& space, const Functional& phi) {
    space.validate();
    require_dim(space, phi, "dual_norm");
    if (space.exponent == 1.0) {
        double m = 0.0;
        for (int j = 0; j < space.dim; ++j)
            m = std::max(m, std::abs(phi[j]) / space.weight(j));
        return m;
    }
    if (space.is_infinity()) {
        double s = 0.0;
        for (int j = 0; j < space.dim; ++j)
            s += std::abs(phi[j]) / space.weight(j);
        return s;
    }
    const double q = conjugate_exponent(space.exponent);
    double s = 0.0;
    for (int j = 0; j < space.dim; ++j)
        s += std::pow(space.weight(j), 1.0 - q) * std::pow(std::abs(phi[j]), q);
    return std::pow(s, 1.0 / q);
}

Functional norming_functional(const SpaceSpec& space, const Vector& x) {
    space.validate();
    require_dim(space, x, "norming_functional");
    const double nx = norm(space, x);
    Functional phi = Functional::zero(space.dim);
    if (nx == 0.0) return phi;
    if (space.exponent == 1.0) {
        for (int j = 0; j < space.dim; ++j)
            phi[j] = space.weight(j) * sgn(x[j]);
        return phi;
    }
    if (space.is_infinity()) {
        int best = 0;
        double bestval = -1.0;
        for (int j = 0; j < space.dim; ++j) {
            const double v = space.weight(j) * std::abs(x[j]);
            if (v > bestval) {
                bestval = v;
                best = j;
            }
        }
        phi[best] = space.weight(best) * sgn(x[best]);
        return phi;
    }
    const double p = space.exponent;
    for (int j = 0; j < space.dim; ++j) {
        if (x[j] == 0.0) continue;
        phi[j] = space.weight(j) * std::pow(std::abs(x[j]), p - 1.0) * sgn(x[j]) /
                 std::pow(nx, p - 1.0);
    }
    return phi;
}

std::vector<Functional> dual_ball_extreme_points(const SpaceSpec& space, int enum_cap) {
    space.validate();
    const int n = space.dim;
    std::vector<Functional> pts;
    if (space.is_infinity()) {
        pts.reserve(static_cast<size_t>(2 * n));
        for (int j = 0; j < n; ++j) {
            for (double s : {-1.0, 1.0}) {
                Functional phi = Functional::zero(n);
                phi[j] = s * space.weight(j);
                pts.push_back(std::move(phi));
            }
        }
        return pts;
    }
    if (space.exponent == 1.0) {
        if (n > enum_cap)
            throw InputError("dual_ball_extreme_points: 2^dim enumeration above cap");
        const std::uint64_t count = 1ULL << n;
        pts.reserve(count);
        for (std::uint64_t mask = 0; mask < count; ++mask) {
            Functional phi = Functional::zero(n);
            for (int j = 0; j < n; ++j)
                phi[j] = ((mask >> j) & 1U ? 1.0 : -1.0) * space.weight(j);
            pts.push_back(std::move(phi));
        }
        return pts;
    }
    throw InputError("dual_ball_extreme_points: dual ball is not a polytope");
}

namespace {

double objective_value(const DualObjective& obj, const Functional& phi) {
    const double v = obj.value(phi);
    if (!std::isfinite(v))
        throw NumericError("dual-ball objective returned a non-finite value");
    return v;
}

Functional numeric_gradient(const DualObjective& obj, const Functional& phi) {
    const double h = 1e-7;
    Functional g = Functional::zero(phi.dim());
    Functional probe = phi;
    for (int j = 0; j < phi.dim(); ++j) {
        const double orig = probe[j];
        probe[j] = orig + h;
        const double up = obj.value(probe);
        probe[j] = orig - h;
        const double dn = obj.value(probe);
        probe[j] = orig;
        g[j] = (up - dn) / (2.0 * h);
    }
    return g;
}

void scale_to_dual_sphere(const SpaceSpec& space, Functional& phi) {
    const double d = dual_norm(space, phi);
    if (d > 0.0)
        for (double& c : phi.coords) c /= d;
}

/// Projected ascent with backtracking step halving from one start point.
Functional ascend_smooth(const SpaceSpec& space, const DualObjective& obj, Functional phi,
                         const SearchConfig& config) {
    scale_to_dual_sphere(space, phi);
    double best = objective_value(obj, phi);
    double step = config.initial_step;
    for (int it = 0; it < config.max_iters; ++it) {
        Functional g = obj.gradient ? obj.gradient(phi) : numeric_gradient(obj, phi);
        double gnorm = 0.0;
        for (double c : g.coords) gnorm += c * c;
        gnorm = std::sqrt(gnorm);
        if (gnorm < 1e-15) break;
        Functional trial = phi;
        for (int j = 0; j < trial.dim(); ++j)
            trial[j] += (step / gnorm) * g[j];
        if (dual_norm(space, trial) > 1.0)
            scale_to_dual_sphere(space, trial);
        const double v = objective_value(obj, trial);
        if (v > best + config.improve_tol) {
            phi = std::move(trial);
            best = v;
        } else {
            step *= 0.5;
            if (step < 1e-14) break;
        }
    }
    return phi;
}

/// Local search on a sign-vertex of the box dual ball (primal exponent 1
/// above the enumeration cap): flip one coordinate at a time while it helps.
Functional ascend_sign_flips(const SpaceSpec& space, const DualObjective& obj, Functional phi,
                             const SearchConfig& config) {
    double best = objective_value(obj, phi);
    bool improved = true;
    int rounds = 0;
    while (improved && rounds++ < config.max_iters) {
        improved = false;
        for (int j = 0; j < space.dim; ++j) {
            phi[j] = -phi[j];
            const double v = objective_value(obj, phi);
            if (v > best + config.improve_tol) {
                best = v;
                improved = true;
            } else {
                phi[j] = -phi[j];
            }
        }
    }
    return phi;
}

Functional random_dual_sphere_point(const SpaceSpec& space, rng::Stream& stream) {
    Functional phi = Functional::zero(space.dim);
    for (int j = 0; j < space.dim; ++j) phi[j] = stream.normal();
    scale_to_dual_sphere(space, phi);
    return phi;
}

Functional random_sign_vertex(const SpaceSpec& space, rng::Stream& stream) {
    Functional phi = Functional::zero(space.dim);
    for (int j = 0; j < space.dim; ++j)
        phi[j] = (stream.next_u64() & 1U ? 1.0 : -1.0) * space.weight(j);
    return phi;
}

void append_ascent_points(const SpaceSpec& space, const DualObjective& obj,
                          const SearchConfig& config, std::vector<Functional>& out) {
    const bool box_mode = space.exponent == 1.0 && space.dim > config.enum_cap;
    for (const Functional& hint : obj.hint_starts) {
        if (hint.dim() != space.dim) continue;
        Functional phi = hint;
        scale_to_dual_sphere(space, phi);
        out.push_back(phi);
        if (config.multistarts <= 0) continue;
        if (box_mode) {
            // Snap onto the nearest sign vertex and polish there.
            Functional vertex = Functional::zero(space.dim);
            for (int j = 0; j < space.dim; ++j)
                vertex[j] = sgn(phi[j]) * space.weight(j);
            out.push_back(ascend_sign_flips(space, obj, std::move(vertex), config));
        } else {
            out.push_back(ascend_smooth(space, obj, std::move(phi), config));
        }
    }
    for (int k = 0; k < config.multistarts; ++k) {
        rng::Stream stream(rng::derive(config.seed, static_cast<std::uint64_t>(k)));
        if (box_mode) {
            out.push_back(ascend_sign_flips(space, obj, random_sign_vertex(space, stream), config));
        } else {
            out.push_back(ascend_smooth(space, obj, random_dual_sphere_point(space, stream), config));
        }
    }
}

} // namespace

DualBallPool build_dual_ball_pool(const SpaceSpec& space,
                                  const std::vector<const DualObjective*>& objectives,
                                  const SearchConfig& config) {
    space.validate();
    DualBallPool pool;
    const bool polytope = space.exponent == 1.0 || space.is_infinity();
    const bool enumerable = space.is_infinity() || space.dim <= config.enum_cap;
    if (polytope && enumerable) {
        pool.points = dual_ball_extreme_points(space, config.enum_cap);
        pool.exhaustive = true;
        // A convex objective is maximized at an extreme point, so ascent
        // adds nothing; run it only for objectives that are not convex,
        // whose maxima can sit in the interior of a face.
        for (const DualObjective* obj : objectives)
            if (!obj->convex_in_phi)
                append_ascent_points(space, *obj, config, pool.points);
        return pool;
    }
    if (config.require_certified)
        throw InputError("certified dual-ball maximization unavailable: "
                         "dual ball is not an enumerable polytope");
    for (const DualObjective* obj : objectives)
        append_ascent_points(space, *obj, config, pool.points);
    if (pool.points.empty()) pool.points.push_back(Functional::zero(space.dim));
    return pool;
}

SupResult evaluate_max(const DualBallPool& pool, const DualObjective& objective) {
    SupResult res;
    bool first = true;
    for (const Functional& phi : pool.points) {
        const double v = objective_value(objective, phi);
        if (first || v > res.value || (v == res.value && phi < res.witness)) {
            res.value = v;
            res.witness = phi;
            first = false;
        }
    }
    return res;
}

SupResult sup_convex_over_dual_ball(const SpaceSpec& space, const DualObjective& objective,
                                    const SearchConfig& config) {
    DualBallPool pool = build_dual_ball_pool(space, {&objective}, config);
    SupResult res = evaluate_max(pool, objective);
    res.certified = pool.exhaustive && objective.convex_in_phi;
    return res;
}

DualObjective make_power_sum_objective(const SpaceSpec& space, const std::vector<Vector>& vectors,
                                       const std::vector<double>& coeffs, double power) {
    if (vectors.size() != coeffs.size())
        throw InputError("make_power_sum_objective: vectors/coeffs size mismatch");
    if (!(power >= 0.0) || !std::isfinite(power))
        throw InputError("make_power_sum_objective: power must be finite and >= 0");
    for (const Vector& x : vectors) require_dim(space, x, "make_power_sum_objective");

    DualObjective obj;
    obj.convex_in_phi = power >= 1.0;

    // Copies keep the objective self-contained after the caller returns.
    auto vecs = std::make_shared<std::vector<Vector>>(vectors);
    auto cs = std::make_shared<std::vector<double>>(coeffs);

    obj.value = [vecs, cs, power](const Functional& phi) {
        double s = 0.0;
        for (size_t i = 0; i < vecs->size(); ++i) {
            const double c = (*cs)[i];
            if (c == 0.0) continue;
            const double t = std::abs(dual_pair((*vecs)[i], phi));
            s += c * std::pow(t, power);
        }
        return s;
    };
    if (power >= 1.0) {
        obj.gradient = [vecs, cs, power](const Functional& phi) {
            Functional g = Functional::zero(phi.dim());
            for (size_t i = 0; i < vecs->size(); ++i) {
                const double c = (*cs)[i];
                if (c == 0.0) continue;
                const double t = dual_pair((*vecs)[i], phi);
                if (t == 0.0) continue;
                const double f = c * power * std::pow(std::abs(t), power - 1.0) * sgn(t);
                for (int j = 0; j < g.dim(); ++j) g[j] += f * (*vecs)[i][j];
            }
            return g;
        };
    }

    for (size_t i = 0; i < vectors.size(); ++i)
        if (coeffs[i] > 0.0) obj.hint_starts.push_back(norming_functional(space, vectors[i]));

    // Quadratic objective on an exponent-2 space: the weighted Gram matrix
    // gives the exact maximizer, so feed its top eigenvector in as a hint.
    if (power == 2.0 && space.exponent == 2.0) {
        if (auto spectral = quadratic_sup_exact(space, vectors, coeffs))
            obj.hint_starts.push_back(spectral->witness);
    }
    return obj;
}

std::optional<SupResult> quadratic_sup_exact(const SpaceSpec& space,
                                             const std::vector<Vector>& vectors,
                                             const std::vector<double>& coeffs) {
    space.validate();
    if (space.exponent != 2.0) return std::nullopt;
    if (vectors.size() != coeffs.size())
        throw InputError("quadratic_sup_exact: vectors/coeffs size mismatch");
    const int n = space.dim;
    // Substituting psi_j = phi_j / sqrt(w_j) turns the dual ball into the
    // Euclidean ball, so the sup is the top eigenvalue of D M D with
    // D = diag(sqrt(w)) and M the coefficient-weighted Gram matrix.
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (size_t i = 0; i < vectors.size(); ++i) {
        if (coeffs[i] == 0.0) continue;
        require_dim(space, vectors[i], "quadratic_sup_exact");
        Eigen::VectorXd xi(n);
        for (int j = 0; j < n; ++j)
            xi[j] = std::sqrt(space.weight(j)) * vectors[i][j];
        m += coeffs[i] * xi * xi.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.info() != Eigen::Success) return std::nullopt;
    SupResult res;
    res.value = std::max(0.0, eig.eigenvalues()[n - 1]);
    Eigen::VectorXd top = eig.eigenvectors().col(n - 1);
    res.witness = Functional::zero(n);
    for (int j = 0; j < n; ++j)
        res.witness[j] = std::sqrt(space.weight(j)) * top[j];
    res.certified = true;
    return res;
}

} // namespace banlab::spaces
