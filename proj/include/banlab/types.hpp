#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace banlab {

/// Bad or inconsistent input: dimension mismatches, invalid parameters,
/// degenerate families, violated kernel contracts.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown, e.g. a non-finite objective value.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed scenario configuration (CLI layer maps this to exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kInfExponent = std::numeric_limits<double>::infinity();

/// A finite-dimensional weighted l_p space. The norm is
/// (sum_j w_j |x_j|^p)^(1/p) for finite p and max_j w_j |x_j| for p = inf.
struct SpaceSpec {
    int dim = 0;
    double exponent = 2.0;               // in [1, inf], inf allowed
    std::vector<double> weights;         // empty means all ones

    SpaceSpec() = default;
    SpaceSpec(int d, double p) : dim(d), exponent(p) {}
    SpaceSpec(int d, double p, std::vector<double> w)
        : dim(d), exponent(p), weights(std::move(w)) {}

    bool is_infinity() const { return std::isinf(exponent); }
    bool has_unit_weights() const {
        for (double w : weights)
            if (w != 1.0) return false;
        return true;
    }
    double weight(int j) const { return weights.empty() ? 1.0 : weights[static_cast<size_t>(j)]; }

    void validate() const {
        if (dim < 1) throw InputError("SpaceSpec: dim must be >= 1");
        if (!(exponent >= 1.0))
            throw InputError("SpaceSpec: exponent must be >= 1 or inf");
        if (!weights.empty() && static_cast<int>(weights.size()) != dim)
            throw InputError("SpaceSpec: weight count does not match dim");
        for (double w : weights)
            if (!(w > 0.0) || !std::isfinite(w))
                throw InputError("SpaceSpec: weights must be positive and finite");
    }

    bool operator==(const SpaceSpec& o) const {
        if (dim != o.dim || exponent != o.exponent) return false;
        for (int j = 0; j < dim; ++j)
            if (weight(j) != o.weight(j)) return false;
        return true;
    }
};

/// Element of a space; coords.size() must match the space dimension.
struct Vector {
    std::vector<double> coords;

    Vector() = default;
    explicit Vector(std::vector<double> c) : coords(std::move(c)) {}

    int dim() const { return static_cast<int>(coords.size()); }
    double operator[](int j) const { return coords[static_cast<size_t>(j)]; }
    double& operator[](int j) { return coords[static_cast<size_t>(j)]; }

    static Vector zero(int n) { return Vector(std::vector<double>(static_cast<size_t>(n), 0.0)); }
    static Vector unit(int n, int j) {
        Vector v = zero(n);
        v[j] = 1.0;
        return v;
    }

    bool operator==(const Vector& o) const { return coords == o.coords; }
};

/// Element of the dual space (dual exponent p' with 1/p + 1/p' = 1,
/// reciprocal weights). Same storage as Vector but a distinct role.
struct Functional {
    std::vector<double> coords;

    Functional() = default;
    explicit Functional(std::vector<double> c) : coords(std::move(c)) {}

    int dim() const { return static_cast<int>(coords.size()); }
    double operator[](int j) const { return coords[static_cast<size_t>(j)]; }
    double& operator[](int j) { return coords[static_cast<size_t>(j)]; }

    static Functional zero(int n) {
        return Functional(std::vector<double>(static_cast<size_t>(n), 0.0));
    }

    bool operator==(const Functional& o) const { return coords == o.coords; }
    bool operator<(const Functional& o) const { return coords < o.coords; }
};

inline void require_dim(const SpaceSpec& space, const Vector& x, const char* what) {
    if (x.dim() != space.dim)
        throw InputError(std::string(what) + ": vector dimension does not match space");
}

inline void require_dim(const SpaceSpec& space, const Functional& phi, const char* what) {
    if (phi.dim() != space.dim)
        throw InputError(std::string(what) + ": functional dimension does not match space");
}

} // namespace banlab
