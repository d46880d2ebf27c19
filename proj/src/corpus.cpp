#include "newton/corpus.hpp"

#include <cmath>

#include "newton/errors.hpp"

namespace newton {

namespace {

CorpusEntry quadratic() {
    // 1/2 x^T diag(1, 10) x
    auto f = [](const Vector& x) { return 0.5 * (x[0] * x[0] + 10.0 * x[1] * x[1]); };
    auto g = [](const Vector& x) { return Vector{x[0], 10.0 * x[1]}; };
    auto h = [](const Vector&) { return DenseMatrix::diagonal({1.0, 10.0}); };
    return {make_objective_problem("quadratic", 2, f, g, h), {1.0, 1.0}, {0.0, 0.0}, 0.0,
            "1/2 x^T diag(1,10) x; minimizer at the origin"};
}

CorpusEntry rosenbrock() {
    auto f = [](const Vector& x) {
        const double a = x[1] - x[0] * x[0];
        const double b = 1.0 - x[0];
        return 100.0 * a * a + b * b;
    };
    auto g = [](const Vector& x) {
        const double a = x[1] - x[0] * x[0];
        return Vector{-400.0 * x[0] * a - 2.0 * (1.0 - x[0]), 200.0 * a};
    };
    auto h = [](const Vector& x) {
        return DenseMatrix::from_rows({{1200.0 * x[0] * x[0] - 400.0 * x[1] + 2.0, -400.0 * x[0]},
                                       {-400.0 * x[0], 200.0}});
    };
    return {make_objective_problem("rosenbrock", 2, f, g, h), {-1.2, 1.0}, {1.0, 1.0}, 0.0,
            "100 (x2 - x1^2)^2 + (1 - x1)^2; minimizer (1, 1)"};
}

CorpusEntry rosenbrock_residual() {
    auto r = [](const Vector& x) { return Vector{10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]}; };
    auto j = [](const Vector& x) { return DenseMatrix::from_rows({{-20.0 * x[0], 10.0}, {-1.0, 0.0}}); };
    auto hs = [](const Vector&) {
        return std::vector<DenseMatrix>{DenseMatrix::from_rows({{-20.0, 0.0}, {0.0, 0.0}}),
                                        DenseMatrix(2, 2)};
    };
    return {make_least_squares_problem("rosenbrock-residual", 2, 2, r, j, hs), {-1.2, 1.0},
            {1.0, 1.0}, 0.0, "residuals (10 (x2 - x1^2), 1 - x1); zero residual at (1, 1)"};
}

CorpusEntry linear_system() {
    static const DenseMatrix a = DenseMatrix::from_rows({{4.0, -1.0, 0.0}, {2.0, 5.0, 1.0}, {0.0, 1.0, 3.0}});
    static const Vector b = {2.0, 11.0, -1.0};
    auto r = [](const Vector& x) { return subtract(multiply(a, x), b); };
    auto j = [](const Vector&) { return a; };
    auto hs = [](const Vector&) { return std::vector<DenseMatrix>(3, DenseMatrix(3, 3)); };
    return {make_equations_problem("linear-system", 3, r, j, hs), {0.0, 0.0, 0.0}, {1.0, 2.0, -1.0},
            0.0, "A x - b with nonsymmetric 3x3 A; solution (1, 2, -1)"};
}

CorpusEntry powell_badly_scaled() {
    auto r = [](const Vector& x) {
        return Vector{1e4 * x[0] * x[1] - 1.0, std::exp(-x[0]) + std::exp(-x[1]) - 1.0001};
    };
    auto j = [](const Vector& x) {
        return DenseMatrix::from_rows(
            {{1e4 * x[1], 1e4 * x[0]}, {-std::exp(-x[0]), -std::exp(-x[1])}});
    };
    auto hs = [](const Vector& x) {
        return std::vector<DenseMatrix>{DenseMatrix::from_rows({{0.0, 1e4}, {1e4, 0.0}}),
                                        DenseMatrix::diagonal({std::exp(-x[0]), std::exp(-x[1])})};
    };
    return {make_equations_problem("powell-badly-scaled", 2, r, j, hs), {0.0, 1.0},
            {1.098159329699e-5, 9.106146739868}, 0.0,
            "(1e4 x1 x2 - 1, e^-x1 + e^-x2 - 1.0001); root near (1.0982e-5, 9.1061)"};
}

}  // namespace

const std::vector<CorpusEntry>& problem_corpus() {
    static const std::vector<CorpusEntry> corpus = {quadratic(), rosenbrock(), rosenbrock_residual(),
                                                    linear_system(), powell_badly_scaled()};
    return corpus;
}

const CorpusEntry& corpus_entry(const std::string& name) {
    for (const auto& entry : problem_corpus())
        if (entry.problem.name == name) return entry;
    throw UnknownComponent(name, "problems");
}

}  // namespace newton
