#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "newton/errors.hpp"
#include "newton/linear_solvers.hpp"
#include "newton/trust_region.hpp"
#include "random_spd.hpp"

using namespace newton;

namespace {

QuadraticModel model(Vector g, DenseMatrix h, double f0 = 0.0) { return {f0, std::move(g), std::move(h)}; }

Vector newton_of(const QuadraticModel& qm) { return solve_lu(qm.H, negated(qm.g)).solution; }

}  // namespace

TEST(Model, Values) {
    EXPECT_DOUBLE_EQ(model_value(model({1, 2}, DenseMatrix::identity(2), 4.0), {0, 0}), 4.0);
    EXPECT_DOUBLE_EQ(model_value(model({1, 0}, DenseMatrix::identity(2)), {-1, 0}), -0.5);
    EXPECT_DOUBLE_EQ(model_value(model({0, 0}, 2.0 * DenseMatrix::identity(2), 3.0), {1, 1}), 5.0);
}

TEST(Cauchy, Examples) {
    EXPECT_EQ(cauchy_point(model({1, 0}, DenseMatrix::identity(2)), 10), (Vector{-1, 0}));
    EXPECT_EQ(cauchy_point(model({1, 0}, DenseMatrix::identity(2)), 0.5), (Vector{-0.5, 0}));
    EXPECT_EQ(cauchy_point(model({1, 0}, -1.0 * DenseMatrix::identity(2)), 2), (Vector{-2, 0}));
    EXPECT_THROW(cauchy_point(model({0, 0}, DenseMatrix::identity(2)), 1), ZeroGradient);
}

TEST(Dogleg, InteriorNewton) {
    const auto qm = model({2, 0}, DenseMatrix::identity(2));
    EXPECT_EQ(dogleg_step(qm, 5, newton_of(qm)), (Vector{-2, 0}));
}

TEST(Dogleg, BoundaryExample) {
    const auto qm = model({1, 1}, DenseMatrix::diagonal({1, 4}));
    const Vector sn = newton_of(qm);  // (-1, -0.25)
    const Vector s = dogleg_step(qm, 0.8, sn);
    EXPECT_NEAR(s[0], -0.7348, 1e-3);
    EXPECT_NEAR(s[1], -0.3163, 1e-3);
    EXPECT_NEAR(norm2(s), 0.8, 1e-12);

    // Independent root: bisection on ||s_U + t d|| - 0.8 over t in [0, 1].
    const Vector su{-0.4, -0.4};
    const Vector d = subtract(sn, su);
    double lo = 0, hi = 1;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (norm2(axpy(mid, d, su)) < 0.8 ? lo : hi) = mid;
    }
    EXPECT_NEAR(lo, 0.558, 1e-3);
    EXPECT_NEAR(norm2(subtract(s, axpy(lo, d, su))), 0.0, 1e-12);
}

TEST(Dogleg, FirstLegClip) {
    const auto qm = model({1, 1}, DenseMatrix::diagonal({1, 4}));
    const Vector s = dogleg_step(qm, 0.3, newton_of(qm));
    const double c = -0.3 / std::sqrt(2.0);
    EXPECT_NEAR(s[0], c, 1e-15);
    EXPECT_NEAR(s[1], c, 1e-15);
}

TEST(Dogleg, BadNewtonStep) {
    const auto qm = model({1, 1}, DenseMatrix::diagonal({1, 4}));
    EXPECT_THROW(dogleg_step(qm, 0.8, {-1, -1}), BadNewtonStep);
}

TEST(Dogleg, BoundaryRegimeHitsRadiusExactly) {
    const auto qm = model({1, 1}, DenseMatrix::diagonal({1, 4}));
    const Vector sn = newton_of(qm);
    const double su = norm2(Vector{-0.4, -0.4});
    const double snn = norm2(sn);
    for (int i = 0; i < 10; ++i) {
        const double radius = su + (snn - su) * (i + 0.5) / 10.0;
        EXPECT_NEAR(norm2(dogleg_step(qm, radius, sn)), radius, 1e-12);
    }
}

TEST(Subspace, IdentityCollapsesToDogleg) {
    const auto qm = model({3, 4}, DenseMatrix::identity(2));
    const Vector sn = newton_of(qm);
    EXPECT_EQ(subspace_2d_step(qm, 1.0, sn), dogleg_step(qm, 1.0, sn));
}

TEST(Subspace, InteriorNewtonExactly) {
    const auto qm = model({1, 1}, DenseMatrix::diagonal({1, 4}));
    const Vector sn = newton_of(qm);
    EXPECT_EQ(subspace_2d_step(qm, 5.0, sn), sn);
}

TEST(Subspace, BeatsDoglegAndGridOracle) {
    const auto qm = model({1, 1}, DenseMatrix::diagonal({1, 4}));
    const Vector sn = newton_of(qm);
    const Vector s2 = subspace_2d_step(qm, 0.8, sn);
    const double m2 = model_value(qm, s2);
    EXPECT_LE(m2, model_value(qm, dogleg_step(qm, 0.8, sn)));
    EXPECT_LE(norm2(s2), 0.8 + 1e-12);

    // In 2D the subspace is the whole plane: compare with a 1e-3 grid over the ball.
    double best = std::numeric_limits<double>::infinity();
    for (int i = -800; i <= 800; ++i) {
        for (int j = -800; j <= 800; ++j) {
            const double x = i * 1e-3, y = j * 1e-3;
            if (x * x + y * y > 0.64) continue;
            best = std::min(best, x + y + 0.5 * (x * x + 4 * y * y));
        }
    }
    EXPECT_LE(m2, best);
    EXPECT_NEAR(m2, best, 1e-3);
}

TEST(Ratio, Examples) {
    // pred = 0.5 via m(s) = 0.5.
    const auto qm = model({-0.5}, DenseMatrix::from_rows({{0}}), 1.0);
    EXPECT_DOUBLE_EQ(agreement_ratio(1.0, 0.5, qm, {1.0}).rho, 1.0);
    EXPECT_DOUBLE_EQ(agreement_ratio(1.0, 0.9, qm, {1.0}).rho, 0.2);
    const auto r = agreement_ratio(1.0, 0.9, qm, {0.0});
    EXPECT_TRUE(r.degenerate);
    EXPECT_EQ(r.rho, -std::numeric_limits<double>::infinity());
}

TEST(Radius, Examples) {
    const auto s = TrustRegionState::with_radius(1.0);
    EXPECT_DOUBLE_EQ(update_radius(s, 0.1, 1.0).state.radius, 0.25);
    EXPECT_TRUE(update_radius(s, 0.1, 1.0).accepted);
    EXPECT_DOUBLE_EQ(update_radius(s, 0.9, 1.0).state.radius, 2.0);
    EXPECT_DOUBLE_EQ(update_radius(s, 0.5, 0.4).state.radius, 1.0);
    EXPECT_FALSE(update_radius(s, 0.05, 0.4).accepted);
    EXPECT_DOUBLE_EQ(update_radius(s, 0.5, 0.4).state.last_rho, 0.5);
    EXPECT_THROW(update_radius(s, 0.5, 1.5), std::invalid_argument);
}

TEST(Radius, CappedAndSentinelShrinks) {
    auto s = TrustRegionState::with_radius(1.0);
    for (int i = 0; i < 20; ++i) s = update_radius(s, 1.0, s.radius).state;
    EXPECT_DOUBLE_EQ(s.radius, s.max_radius);
    const double before = s.radius;
    s = update_radius(s, -std::numeric_limits<double>::infinity(), 0.5 * s.radius).state;
    EXPECT_LT(s.radius, before);
}

TEST(Radius, Violations) {
    auto s = TrustRegionState::with_radius(1.0);
    EXPECT_FALSE(s.violation());
    s.eta_shrink = 0.9;
    EXPECT_EQ(s.violation()->first, "eta2");
    s = TrustRegionState::with_radius(-1.0);
    EXPECT_EQ(s.violation()->first, "delta0");
}

TEST(Property, FeasibilityAndOrdering) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 2 + t % 5;
        const auto qm = model(testing_support::random_vector(rng, n),
                              testing_support::random_spd(rng, n, 1e3), 0.0);
        const double radius = std::pow(10.0, -2.0 + 3.0 * u(rng));
        const Vector sn = solve_cholesky(qm.H, negated(qm.g), false).solution;
        const Vector sc = cauchy_point(qm, radius);
        const Vector sd = dogleg_step(qm, radius, sn);
        const Vector s2 = subspace_2d_step(qm, radius, sn);
        for (const Vector* s : {&sc, &sd, &s2}) EXPECT_LE(norm2(*s), radius + 1e-12);
        EXPECT_LE(model_value(qm, s2), model_value(qm, sd) + 1e-10);
        EXPECT_LE(model_value(qm, sd), model_value(qm, sc) + 1e-10);
        EXPECT_LT(model_value(qm, sc), 0.0);
    }
}

TEST(Subproblems, ByName) {
    for (const char* name : {"cauchy", "dogleg", "subspace-2d"}) EXPECT_EQ(make_subproblem(name)->name(), name);
    EXPECT_FALSE(make_subproblem("cauchy")->needs_newton_step());
    EXPECT_THROW(make_subproblem("exact"), UnknownStrategy);
}
