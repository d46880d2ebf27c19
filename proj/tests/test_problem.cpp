#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "newton/corpus.hpp"
#include "newton/errors.hpp"
#include "newton/problem.hpp"

using namespace newton;

namespace {

ProblemDefinition identity_equations(std::size_t n) {
    return make_equations_problem("identity", n, [](const Vector& x) { return x; });
}

}  // namespace

TEST(Transform, IdentityResidualScalar) {
    const auto p = transform_ne_to_uo(identity_equations(1));
    EXPECT_EQ(p.kind, ProblemKind::UO);
    EXPECT_EQ(p.transformed_from, ProblemKind::NE);
    EXPECT_DOUBLE_EQ(p.objective({2.0}), 2.0);
}

TEST(Transform, ConstantResidual) {
    auto ne = make_equations_problem("const", 2, [](const Vector&) { return Vector{3.0, 4.0}; });
    const auto p = transform_ne_to_uo(ne);
    EXPECT_DOUBLE_EQ(p.objective({0.0, 0.0}), 12.5);
    EXPECT_DOUBLE_EQ(p.objective({-7.0, 1e3}), 12.5);
}

TEST(Transform, RosenbrockResidualZeroAtMinimizer) {
    const auto p = transform_ne_to_uo(corpus_entry("rosenbrock-residual").problem);
    EXPECT_EQ(p.transformed_from, ProblemKind::NLS);
    EXPECT_EQ(p.objective({1.0, 1.0}), 0.0);
}

TEST(Transform, RejectsObjectiveProblem) {
    EXPECT_THROW(transform_ne_to_uo(corpus_entry("rosenbrock").problem), KindError);
}

TEST(Transform, MeritMatchesHalfSquaredResidualOnSamples) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (const char* name : {"linear-system", "powell-badly-scaled"}) {
        const auto& ne = corpus_entry(name).problem;
        const auto p = transform_ne_to_uo(ne);
        for (int t = 0; t < 50; ++t) {
            Vector x(ne.n);
            for (double& v : x) v = u(rng);
            const Vector F = ne.residual(x);
            double oracle = 0.0;
            for (double fi : F) oracle += fi * fi;
            oracle *= 0.5;
            EXPECT_NEAR(p.objective(x), oracle, 1e-15 * std::max(1.0, std::abs(oracle))) << name;
        }
    }
}

TEST(NlsGradient, Examples) {
    EXPECT_EQ(nls_gradient(DenseMatrix::identity(2), {1.0, 2.0}), (Vector{1.0, 2.0}));
    EXPECT_EQ(nls_gradient(DenseMatrix::from_rows({{2, 0}, {0, 3}}), {1.0, 1.0}), (Vector{2.0, 3.0}));
    const auto j = DenseMatrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
    EXPECT_EQ(nls_gradient(j, {0.0, 0.0, 0.0}), (Vector{0.0, 0.0}));
    EXPECT_THROW(nls_gradient(j, {1.0, 2.0}), DimensionMismatch);
}

TEST(NlsHessian, Examples) {
    EXPECT_EQ(nls_hessian(DenseMatrix::identity(2), {5.0, -1.0}), DenseMatrix::identity(2));

    const std::vector<DenseMatrix> h1{DenseMatrix::from_rows({{3}})};
    EXPECT_DOUBLE_EQ(nls_hessian(DenseMatrix::from_rows({{1}}), {2.0}, h1)(0, 0), 7.0);

    const auto j = DenseMatrix::from_rows({{1, 2}, {0, 1}});
    const std::vector<DenseMatrix> hs{DenseMatrix::from_rows({{9, 1}, {1, 9}}),
                                      DenseMatrix::from_rows({{-4, 2}, {2, 8}})};
    EXPECT_EQ(nls_hessian(j, {0.0, 0.0}, hs), gram(j));
    EXPECT_THROW(nls_hessian(j, {0.0, 0.0}, std::span(hs).first(1)), DimensionMismatch);
}

TEST(Evaluate, AnalyticObjective) {
    auto p = make_objective_problem(
        "sq", 2, [](const Vector& x) { return x[0] * x[0] + x[1] * x[1]; },
        [](const Vector& x) { return Vector{2 * x[0], 2 * x[1]}; });
    const auto rec = evaluate(p, {1.0, 1.0}, Quantity::Value | Quantity::Gradient);
    EXPECT_DOUBLE_EQ(*rec.f, 2.0);
    EXPECT_EQ(*rec.g, (Vector{2.0, 2.0}));
}

TEST(Evaluate, EquationsThroughMerit) {
    const auto p = transform_ne_to_uo(make_equations_problem(
        "id", 1, [](const Vector& x) { return x; },
        [](const Vector&) { return DenseMatrix::identity(1); }));
    const auto rec = evaluate(p, {3.0}, Quantity::Value | Quantity::Gradient);
    EXPECT_DOUBLE_EQ(*rec.f, 4.5);
    EXPECT_DOUBLE_EQ((*rec.g)[0], 3.0);
}

TEST(Evaluate, FiniteDifferenceGradientFallback) {
    auto p = make_objective_problem("x2", 1, [](const Vector& x) { return x[0] * x[0]; });
    const auto rec = evaluate(p, {1.0}, Quantity::Gradient);
    EXPECT_NEAR((*rec.g)[0], 2.0, 1e-6);
}

TEST(Evaluate, NlsGradientIsTheCompositionPath) {
    const auto& e = corpus_entry("rosenbrock-residual");
    const Vector x{0.3, -0.7};
    const auto rec = evaluate(e.problem, x, Quantity::Gradient);
    EXPECT_EQ(*rec.g, nls_gradient(e.problem.jacobian(x), e.problem.residual(x)));
}

TEST(Evaluate, StoredHessianIsExactlySymmetric) {
    // No analytic Hessian: the fd Hessian is symmetrized on store.
    auto p = make_objective_problem("cubic", 3, [](const Vector& x) {
        return x[0] * x[1] * x[1] + std::sin(x[0] * x[2]) + x[2] * x[2] * x[1];
    });
    const auto rec = evaluate(p, {0.4, -1.3, 2.2}, Quantity::Hessian);
    const DenseMatrix& h = *rec.H;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(h(i, j), h(j, i));
}

TEST(Evaluate, CountsAreMonotoneAndCached) {
    const auto& p = corpus_entry("rosenbrock").problem;
    Evaluator ev(p);
    ev.evaluate({0.0, 0.0}, Quantity::Value);
    EvalCounts before = ev.counts();
    ev.evaluate({0.0, 0.0}, Quantity::Value);
    EXPECT_EQ(ev.counts(), before);  // cached
    ev.evaluate({0.0, 0.0}, Quantity::Gradient | Quantity::Hessian);
    EXPECT_GE(ev.counts().g, before.g + 1);
    EXPECT_GE(ev.counts().H, before.H + 1);
    before = ev.counts();
    ev.evaluate({1.0, 0.0}, Quantity::Value);  // new point
    EXPECT_EQ(ev.counts().f, before.f + 1);
    EXPECT_GE(ev.counts().g, before.g);
}

TEST(Evaluate, CallbackFailureIsWrapped) {
    auto p = make_objective_problem("boom", 1, [](const Vector&) -> double {
        throw std::runtime_error("domain");
    });
    EXPECT_THROW(evaluate(p, {0.0}, Quantity::Value), EvaluationError);
}

TEST(Evaluate, NonFiniteOutput) {
    auto p = make_objective_problem("log", 1, [](const Vector& x) { return std::log(x[0]); });
    EXPECT_THROW(evaluate(p, {-1.0}, Quantity::Value), NonFiniteValue);
}

TEST(Evaluate, WrongLength) {
    EXPECT_THROW(evaluate(corpus_entry("rosenbrock").problem, {1.0}, Quantity::Value),
                 DimensionMismatch);
}

TEST(FiniteDifferences, Examples) {
    auto sq = make_objective_problem("x2", 1, [](const Vector& x) { return x[0] * x[0]; });
    EXPECT_NEAR(fd_gradient(sq, {3.0})[0], 6.0, 1e-6);

    // m < n fails validation, but differences only need the callback.
    ProblemDefinition bilinear;
    bilinear.name = "xy";
    bilinear.kind = ProblemKind::NLS;
    bilinear.n = 2;
    bilinear.m = 1;
    bilinear.residual = [](const Vector& x) { return Vector{x[0] * x[1]}; };
    const DenseMatrix j = fd_jacobian(bilinear, {2.0, 3.0});
    EXPECT_NEAR(j(0, 0), 3.0, 1e-6);
    EXPECT_NEAR(j(0, 1), 2.0, 1e-6);

    // d2/dx1^2 = 2 x2, d2/dx1dx2 = 2 x1, d2/dx2^2 = 0
    auto f = make_objective_problem("x1^2 x2", 2, [](const Vector& x) { return x[0] * x[0] * x[1]; });
    const DenseMatrix h = fd_hessian(f, {1.0, 1.0});
    EXPECT_NEAR(h(0, 0), 2.0, 1e-4);
    EXPECT_NEAR(h(0, 1), 2.0, 1e-4);
    EXPECT_NEAR(h(1, 0), 2.0, 1e-4);
    EXPECT_NEAR(h(1, 1), 0.0, 1e-4);
}

TEST(FiniteDifferences, StepSize) {
    EXPECT_DOUBLE_EQ(fd_step(0.5), 1e-6);
    EXPECT_DOUBLE_EQ(fd_step(-20.0), 2e-5);
}

TEST(Validate, KindInvariants) {
    auto two = [](const Vector& x) { return Vector{x[0], x[1]}; };
    EXPECT_THROW(make_least_squares_problem("short", 3, 2, two), KindError);
    ProblemDefinition bad_nls;
    bad_nls.name = "short";
    bad_nls.kind = ProblemKind::NLS;
    bad_nls.n = 3;
    bad_nls.m = 2;
    bad_nls.residual = two;
    EXPECT_THROW(validate(bad_nls), KindError);
    ProblemDefinition empty;
    empty.name = "none";
    EXPECT_THROW(validate(empty), std::exception);
    auto ne = identity_equations(2);
    ne.m = 3;
    EXPECT_THROW(validate(ne), KindError);
    for (const auto& e : problem_corpus()) EXPECT_NO_THROW(validate(e.problem)) << e.problem.name;
}

TEST(Corpus, StandardValues) {
    const auto& r = corpus_entry("rosenbrock");
    EXPECT_NEAR(r.problem.objective(r.standard_start), 24.2, 1e-12);
    for (const auto& e : problem_corpus()) {
        const auto p = e.problem.kind == ProblemKind::UO ? e.problem : transform_ne_to_uo(e.problem);
        EXPECT_NEAR(p.objective(e.minimizer), e.minimum, 1e-12) << e.problem.name;
    }
    EXPECT_THROW(corpus_entry("nope"), UnknownComponent);
}
