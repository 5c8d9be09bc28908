#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "banlab/rng.hpp"
#include "banlab/summing.hpp"
#include "oracles.hpp"

using namespace banlab;
using summing::Operator;
using summing::SummingKind;
using summing::SummingParams;
using summing::VectorFamily;

namespace {

SpaceSpec l1(int n) { return SpaceSpec(n, 1.0); }
SpaceSpec l2(int n) { return SpaceSpec(n, 2.0); }
SpaceSpec linf(int n) { return SpaceSpec(n, kInfExponent); }

Vector vec(std::vector<double> c) { return Vector(std::move(c)); }

VectorFamily basis_family(const SpaceSpec& space) {
    VectorFamily fam{space, {}};
    for (int j = 0; j < space.dim; ++j) fam.vectors.push_back(Vector::unit(space.dim, j));
    return fam;
}

Operator random_operator(rng::Stream& s, const SpaceSpec& dom, const SpaceSpec& cod) {
    Operator T = Operator::zero(dom, cod);
    for (auto& row : T.matrix)
        for (double& v : row) v = s.normal();
    return T;
}

Operator j1_half() {
    Operator j = Operator::identity(linf(2));
    j.codomain = SpaceSpec(2, 1.0, {0.5, 0.5});
    return j;
}

SummingParams psumming(double p) {
    SummingParams params;
    params.kind = SummingKind::p_summing;
    params.p = p;
    return params;
}

} // namespace

TEST_CASE("Operator: apply, validate, constructors") {
    Operator d = Operator::diagonal(l2(2), {1.0, 2.0});
    Vector y = d.apply(vec({1, 1}));
    CHECK(y.coords == std::vector<double>{1.0, 2.0});
    CHECK_THROWS_AS(d.apply(vec({1})), InputError);

    Operator bad = Operator::zero(l2(2), l2(2));
    bad.matrix.pop_back();
    CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("strong_power_sum: frozen values") {
    Operator id2 = Operator::identity(l2(2));
    CHECK(summing::strong_power_sum(id2, basis_family(l2(2)), 2.0) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    Operator zero = Operator::zero(l2(2), l2(2));
    CHECK(summing::strong_power_sum(zero, basis_family(l2(2)), 2.0) == 0.0);
    // diag(1,2) on the basis at r=1: 1 + 2.
    Operator d = Operator::diagonal(l2(2), {1.0, 2.0});
    CHECK(summing::strong_power_sum(d, basis_family(l2(2)), 1.0) ==
          doctest::Approx(3.0).epsilon(1e-14));

    VectorFamily wrong{l2(3), {Vector::zero(3)}};
    CHECK_THROWS_AS(summing::strong_power_sum(id2, wrong, 2.0), InputError);
}

TEST_CASE("weak_power_sup: frozen values and oracle cross-checks") {
    for (int n : {2, 3, 4})
        CHECK(summing::weak_power_sup(basis_family(l2(n)), 2.0) ==
              doctest::Approx(1.0).epsilon(1e-12));

    // Singleton: the weak sup at any exponent is the norm.
    rng::Stream s(21);
    for (int trial = 0; trial < 50; ++trial) {
        const double exps[] = {1.0, 2.0, kInfExponent};
        SpaceSpec space(3, exps[s.below(3)]);
        Vector x = Vector::zero(3);
        for (int j = 0; j < 3; ++j) x[j] = s.normal();
        VectorFamily fam{space, {x}};
        const double r = 1.0 + s.uniform(0.0, 3.0);
        CHECK(summing::weak_power_sup(fam, r) ==
              doctest::Approx(spaces::norm(space, x)).epsilon(1e-10));
    }

    // Two basis vectors of the 1-norm plane at r = 1: the sign corners give 2.
    VectorFamily fam{l1(2), {vec({1, 0}), vec({0, 1})}};
    const double direct = oracles::sup_over_polytope_dual(l1(2), [&](const Functional& phi) {
        return std::abs(phi[0]) + std::abs(phi[1]);
    });
    CHECK(direct == doctest::Approx(2.0));
    CHECK(summing::weak_power_sup(fam, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("weak_power_sup: spectral route agrees with a singular-value oracle") {
    rng::Stream s(22);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(s.below(3));
        VectorFamily fam{l2(n), {}};
        const int m = 1 + static_cast<int>(s.below(4));
        for (int i = 0; i < m; ++i) {
            Vector v = Vector::zero(n);
            for (int j = 0; j < n; ++j) v[j] = s.normal();
            fam.vectors.push_back(std::move(v));
        }
        // Independent oracle: top singular value of the family matrix.
        Eigen::MatrixXd X(n, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) X(j, i) = fam.vectors[static_cast<size_t>(i)][j];
        const double sv = Eigen::JacobiSVD<Eigen::MatrixXd>(X).singularValues()[0];
        CHECK(summing::weak_power_sup(fam, 2.0) == doctest::Approx(sv).epsilon(1e-10));
    }
}

TEST_CASE("mixed_power_sup: reductions and closed forms") {
    rng::Stream s(23);
    for (int trial = 0; trial < 60; ++trial) {
        const double exps[] = {1.0, 2.0, kInfExponent};
        SpaceSpec space(3, exps[s.below(3)]);
        Vector x = Vector::zero(3);
        for (int j = 0; j < 3; ++j) x[j] = s.normal();
        const double p = s.below(2) == 0 ? 1.0 : 2.0;
        const double sigma = 0.25 * static_cast<double>(s.below(4));

        VectorFamily single{space, {x}};
        CHECK(summing::mixed_power_sup(single, p, sigma) ==
              doctest::Approx(spaces::norm(space, x)).epsilon(1e-10));

        // sigma = 0 reduction.
        VectorFamily pair{space, {x, Vector::unit(3, 0)}};
        CHECK(summing::mixed_power_sup(pair, p, 0.0) ==
              doctest::Approx(summing::weak_power_sup(pair, p)).epsilon(1e-12));

        // Duplicate family: 2^((1-sigma)/p) times the norm.
        VectorFamily dup{space, {x, x}};
        CHECK(summing::mixed_power_sup(dup, p, sigma) ==
              doctest::Approx(std::pow(2.0, (1.0 - sigma) / p) * spaces::norm(space, x))
                  .epsilon(1e-10));
    }
    VectorFamily fam{l2(2), {vec({1, 0})}};
    CHECK_THROWS_AS(summing::mixed_power_sup(fam, 1.0, 1.0), InputError);
}

TEST_CASE("summing_ratio: frozen values and degenerate cases") {
    for (int n : {2, 3, 4}) {
        Operator id = Operator::identity(l2(n));
        CHECK(summing::summing_ratio(id, basis_family(l2(n)), psumming(2.0)) ==
              doctest::Approx(std::sqrt(n)).epsilon(1e-12));
    }
    Operator zero = Operator::zero(l2(2), l2(2));
    CHECK(summing::summing_ratio(zero, basis_family(l2(2)), psumming(2.0)) == 0.0);

    Vector x = vec({0.3, -1.2});
    for (const double p : {1.0, 2.0}) {
        VectorFamily single{l2(2), {x}};
        CHECK(summing::summing_ratio(Operator::identity(l2(2)), single, psumming(p)) ==
              doctest::Approx(1.0).epsilon(1e-10));
    }

    VectorFamily zeros{l2(2), {Vector::zero(2)}};
    CHECK_THROWS_AS(
        summing::summing_ratio(Operator::identity(l2(2)), zeros, psumming(1.0)), InputError);

    // Zero vectors inside a family are ignored.
    VectorFamily mixed{l2(2), {Vector::zero(2), x}};
    VectorFamily clean{l2(2), {x}};
    CHECK(summing::summing_ratio(Operator::identity(l2(2)), mixed, psumming(2.0)) ==
          doctest::Approx(
              summing::summing_ratio(Operator::identity(l2(2)), clean, psumming(2.0)))
              .epsilon(1e-14));
}

TEST_CASE("summing_ratio: invariant under scaling the whole family") {
    rng::Stream s(25);
    for (int trial = 0; trial < 40; ++trial) {
        const double exps[] = {1.0, 2.0, kInfExponent};
        SpaceSpec dom(3, exps[s.below(3)]);
        SpaceSpec cod(2, exps[s.below(3)]);
        Operator T = random_operator(s, dom, cod);
        VectorFamily fam{dom, {}};
        for (int i = 0; i < 3; ++i) {
            Vector v = Vector::zero(3);
            for (int j = 0; j < 3; ++j) v[j] = s.normal();
            fam.vectors.push_back(std::move(v));
        }
        SummingParams params;
        const int kindpick = static_cast<int>(s.below(3));
        params.kind = kindpick == 0 ? SummingKind::p_summing
                                    : (kindpick == 1 ? SummingKind::pq_summing
                                                     : SummingKind::p_sigma);
        params.p = 2.0;
        params.q = 1.5;
        params.sigma = 0.5;

        const double base = summing::summing_ratio(T, fam, params);
        const double c = s.uniform(0.2, 4.0);
        VectorFamily scaled = fam;
        for (Vector& v : scaled.vectors)
            for (double& t : v.coords) t *= c;
        CHECK(summing::summing_ratio(T, scaled, params) == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("summing_ratio: ordering across kinds on a fixed family") {
    rng::Stream s(26);
    for (int trial = 0; trial < 40; ++trial) {
        const double exps[] = {1.0, 2.0, kInfExponent};
        SpaceSpec dom(3, exps[s.below(3)]);
        Operator T = random_operator(s, dom, l2(2));
        VectorFamily fam{dom, {}};
        for (int i = 0; i < 3; ++i) {
            Vector v = Vector::zero(3);
            for (int j = 0; j < 3; ++j) v[j] = s.normal();
            fam.vectors.push_back(std::move(v));
        }
        const double p = s.below(2) == 0 ? 1.0 : 2.0;
        const double sigma = 0.25 + 0.25 * static_cast<double>(s.below(3));

        SummingParams interp = psumming(p / (1.0 - sigma));
        SummingParams withsigma;
        withsigma.kind = SummingKind::p_sigma;
        withsigma.p = p;
        withsigma.sigma = sigma;
        SummingParams pq;
        pq.kind = SummingKind::pq_summing;
        pq.p = p / (1.0 - sigma);
        pq.q = p;

        const double r1 = summing::summing_ratio(T, fam, interp);
        const double r2 = summing::summing_ratio(T, fam, withsigma);
        const double r3 = summing::summing_ratio(T, fam, pq);
        CHECK(r1 >= r2 * (1 - 1e-10));
        CHECK(r2 >= r3 * (1 - 1e-10));
    }
}

TEST_CASE("summing_chain: reductions and ordering") {
    rng::Stream s(27);
    // sigma = 0 collapses the three quantities.
    VectorFamily fam{l2(3), {vec({1, 0, 1}), vec({0, -2, 1})}};
    auto chain0 = summing::summing_chain(fam, 2.0, 0.0);
    CHECK(chain0.weak_interpolated == doctest::Approx(chain0.mixed).epsilon(1e-12));
    CHECK(chain0.mixed == doctest::Approx(chain0.weak_base).epsilon(1e-12));

    // Singleton: first two quantities equal the norm.
    Vector x = vec({0.5, 1.5, -1.0});
    VectorFamily single{l2(3), {x}};
    auto chain1 = summing::summing_chain(single, 1.0, 0.5);
    CHECK(chain1.weak_interpolated == doctest::Approx(spaces::norm(l2(3), x)).epsilon(1e-10));
    CHECK(chain1.mixed == doctest::Approx(spaces::norm(l2(3), x)).epsilon(1e-10));

    // Random families: the three displayed inequalities, line by line.
    for (int trial = 0; trial < 120; ++trial) {
        const double exps[] = {1.0, 2.0, kInfExponent};
        SpaceSpec space(2 + static_cast<int>(s.below(4)), exps[s.below(3)]);
        VectorFamily rf{space, {}};
        const int m = 1 + static_cast<int>(s.below(4));
        for (int i = 0; i < m; ++i) {
            Vector v = Vector::zero(space.dim);
            for (int j = 0; j < space.dim; ++j) v[j] = s.normal();
            rf.vectors.push_back(std::move(v));
        }
        const double p = s.below(2) == 0 ? 1.0 : 2.0;
        const double sigma = 0.9 * s.uniform();
        spaces::SearchConfig engine;
        engine.seed = static_cast<std::uint64_t>(trial);
        engine.multistarts = 8;
        engine.max_iters = 500;
        const auto chain = summing::summing_chain(rf, p, sigma, engine);
        const double scaled =
            chain.max_norm_sigma * std::pow(chain.weak_base, 1.0 - sigma);
        CHECK(chain.weak_interpolated <= chain.mixed + 1e-10);
        CHECK(chain.mixed <= scaled + 1e-10);
        CHECK(scaled <= chain.weak_base + 1e-10);
    }
}

TEST_CASE("hilbert_schmidt_norm: frozen values and SVD oracle") {
    CHECK(summing::hilbert_schmidt_norm(Operator::diagonal(l2(2), {3.0, 4.0})) ==
          doctest::Approx(5.0).epsilon(1e-14));
    for (int n : {2, 3, 5})
        CHECK(summing::hilbert_schmidt_norm(Operator::identity(l2(n))) ==
              doctest::Approx(std::sqrt(n)).epsilon(1e-14));
    CHECK(summing::hilbert_schmidt_norm(Operator::zero(l2(3), l2(2))) == 0.0);
    CHECK_THROWS_AS(summing::hilbert_schmidt_norm(Operator::identity(l1(2))), InputError);
    Operator weighted = Operator::identity(SpaceSpec(2, 2.0, {2.0, 1.0}));
    CHECK_THROWS_AS(summing::hilbert_schmidt_norm(weighted), InputError);

    // Entry formula vs sum of squared singular values.
    rng::Stream s(28);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(s.below(4));
        Operator T = random_operator(s, l2(n), l2(n));
        Eigen::MatrixXd M(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                M(i, j) = T.matrix[static_cast<size_t>(i)][static_cast<size_t>(j)];
        const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues();
        CHECK(summing::hilbert_schmidt_norm(T) ==
              doctest::Approx(std::sqrt(sv.squaredNorm())).epsilon(1e-12));
    }
}

TEST_CASE("estimate_ideal_norm_lower: oracle escapes") {
    summing::FamilySearchConfig cfg;
    cfg.seed = 4;
    cfg.restarts = 32;

    auto est = summing::estimate_ideal_norm_lower(Operator::identity(l2(2)), psumming(2.0), cfg);
    CHECK(est.certification == summing::Certification::exact);
    CHECK(est.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(est.diagnostics.oracle == "hilbert_schmidt");

    auto estj = summing::estimate_ideal_norm_lower(j1_half(), psumming(1.0), cfg);
    CHECK(estj.certification == summing::Certification::exact);
    CHECK(estj.value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(estj.diagnostics.oracle == "identification_map_total_mass");

    auto est0 =
        summing::estimate_ideal_norm_lower(Operator::zero(l2(2), l2(2)), psumming(1.0), cfg);
    CHECK(est0.value == 0.0);
    CHECK(est0.certification == summing::Certification::exact);
}

TEST_CASE("estimate_ideal_norm_lower: search stays below the j1 optimum") {
    summing::FamilySearchConfig cfg;
    cfg.seed = 6;
    cfg.restarts = 64;
    cfg.use_oracles = false;
    const auto est = summing::estimate_ideal_norm_lower(j1_half(), psumming(1.0), cfg);
    CHECK(est.certification == summing::Certification::lower_bound);
    CHECK(est.value <= 1.0 + 1e-9);
    CHECK(est.value == doctest::Approx(1.0).epsilon(1e-12));  // the ones family attains it

    // Brute force at n = 4: every sign-vector singleton attains the total
    // mass and no random family beats it.
    const int n = 4;
    Operator j = Operator::identity(linf(n));
    j.codomain = SpaceSpec(n, 1.0, {0.4, 0.3, 0.2, 0.1});
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        Vector v = Vector::zero(n);
        for (int i = 0; i < n; ++i) v[i] = ((mask >> i) & 1U) ? 1.0 : -1.0;
        VectorFamily fam{j.domain, {v}};
        CHECK(summing::summing_ratio(j, fam, psumming(1.0)) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    summing::FamilySearchConfig cfg2;
    cfg2.seed = 7;
    cfg2.restarts = 128;
    cfg2.use_oracles = false;
    CHECK(summing::estimate_ideal_norm_lower(j, psumming(1.0), cfg2).value <= 1.0 + 1e-9);
}

TEST_CASE("estimate_ideal_norm_lower: Hilbert search bounded by the entry norm") {
    rng::Stream s(29);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 2 + static_cast<int>(s.below(2));
        Operator T = random_operator(s, l2(n), l2(n));
        const double hs = summing::hilbert_schmidt_norm(T);

        CHECK(summing::summing_ratio(T, basis_family(l2(n)), psumming(2.0)) ==
              doctest::Approx(hs).epsilon(1e-10));

        summing::FamilySearchConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(trial);
        cfg.restarts = 48;
        cfg.use_oracles = false;
        const auto est = summing::estimate_ideal_norm_lower(T, psumming(2.0), cfg);
        CHECK(est.value <= hs + 1e-8);
        CHECK(est.value >= 0.99 * hs);
    }
}

TEST_CASE("estimate_ideal_norm_lower: monotone in restarts, deterministic") {
    rng::Stream s(30);
    Operator T = random_operator(s, linf(3), l2(2));
    summing::FamilySearchConfig cfg;
    cfg.seed = 11;
    cfg.use_oracles = false;
    double prev = -1.0;
    for (int restarts : {4, 8, 16, 32}) {
        cfg.restarts = restarts;
        const double v = summing::estimate_ideal_norm_lower(T, psumming(1.0), cfg).value;
        CHECK(v >= prev);
        prev = v;
    }
    cfg.restarts = 16;
    const auto a = summing::estimate_ideal_norm_lower(T, psumming(1.0), cfg);
    const auto b = summing::estimate_ideal_norm_lower(T, psumming(1.0), cfg);
    CHECK(a.value == b.value);
}

TEST_CASE("SummingParams validation") {
    CHECK_THROWS_AS(psumming(0.5).validate(), InputError);
    SummingParams pq;
    pq.kind = SummingKind::pq_summing;
    pq.p = 2.0;
    pq.q = 3.0;
    CHECK_THROWS_AS(pq.validate(), InputError);
    SummingParams ps;
    ps.kind = SummingKind::p_sigma;
    ps.p = 1.0;
    ps.sigma = 1.0;
    CHECK_THROWS_AS(ps.validate(), InputError);
    ps.sigma = 0.5;
    CHECK(ps.strong_exponent() == doctest::Approx(2.0));
}
