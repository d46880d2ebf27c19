#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "newton/linalg.hpp"

namespace newton {

// NE: F(x) = 0 with F: R^n -> R^n.
// UO: minimize f: R^n -> R.
// NLS: minimize 1/2 ||F(x)||^2 with F: R^n -> R^m, m >= n.
enum class ProblemKind { NE, UO, NLS };

std::string_view to_string(ProblemKind kind);

using ScalarFunction = std::function<double(const Vector&)>;
using VectorFunction = std::function<Vector(const Vector&)>;
using MatrixFunction = std::function<DenseMatrix(const Vector&)>;
using MatrixListFunction = std::function<std::vector<DenseMatrix>(const Vector&)>;

// Immutable once built; callbacks must be pure and re-entrant so a definition
// can be shared by concurrent solver runs.
struct ProblemDefinition {
    std::string name;
    ProblemKind kind = ProblemKind::UO;
    std::size_t n = 0;
    std::size_t m = 0;  // residual length; 0 for a plain objective

    ScalarFunction objective;  // UO
    VectorFunction residual;   // NE / NLS (kept by the merit transform)

    VectorFunction gradient;                // optional, UO
    MatrixFunction jacobian;                // optional, m x n
    MatrixFunction hessian;                 // optional, n x n
    MatrixListFunction residual_hessians;  // optional, m matrices n x n

    // Set on the result of transform_ne_to_uo.
    std::optional<ProblemKind> transformed_from;

    bool has_residual() const noexcept { return static_cast<bool>(residual); }
};

// Throws KindError / DimensionMismatch when the kind invariants do not hold.
void validate(const ProblemDefinition& p);

ProblemDefinition make_objective_problem(std::string name, std::size_t n, ScalarFunction objective,
                                         VectorFunction gradient = {}, MatrixFunction hessian = {});
ProblemDefinition make_equations_problem(std::string name, std::size_t n, VectorFunction residual,
                                         MatrixFunction jacobian = {},
                                         MatrixListFunction residual_hessians = {});
ProblemDefinition make_least_squares_problem(std::string name, std::size_t n, std::size_t m,
                                             VectorFunction residual, MatrixFunction jacobian = {},
                                             MatrixListFunction residual_hessians = {});

// f(x) = 1/2 ||F(x)||^2 as a UO problem. The residual, Jacobian and residual
// Hessians are retained so derivatives compose as J^T F and J^T J + sum F_i H_i.
ProblemDefinition transform_ne_to_uo(const ProblemDefinition& p);

// Views a square NE system as an NLS problem (m = n).
ProblemDefinition as_least_squares(const ProblemDefinition& p);

// 1/2 * sum F_i^2, summed in index order.
double half_squared_norm(const Vector& residual);

// J^T F.
Vector nls_gradient(const DenseMatrix& jacobian, const Vector& residual);

// J^T J + sum_i F_i * H_i. An empty residual_hessians span gives the
// Gauss-Newton approximation J^T J.
DenseMatrix nls_hessian(const DenseMatrix& jacobian, const Vector& residual,
                        std::span<const DenseMatrix> residual_hessians = {});

enum class Quantity : unsigned {
    None = 0,
    Value = 1u << 0,     // f
    Residual = 1u << 1,  // F
    Gradient = 1u << 2,  // g
    Jacobian = 1u << 3,  // J
    Hessian = 1u << 4,   // H
};

constexpr Quantity operator|(Quantity a, Quantity b) {
    return static_cast<Quantity>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}
constexpr bool has(Quantity set, Quantity q) {
    return (static_cast<unsigned>(set) & static_cast<unsigned>(q)) != 0;
}

// Number of times each quantity was produced, by whatever route.
struct EvalCounts {
    std::size_t f = 0;
    std::size_t F = 0;
    std::size_t g = 0;
    std::size_t J = 0;
    std::size_t H = 0;

    friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

struct EvalRecord {
    Vector x;
    std::optional<double> f;
    std::optional<Vector> F;
    std::optional<Vector> g;
    std::optional<DenseMatrix> J;
    std::optional<DenseMatrix> H;  // stored symmetrized
    EvalCounts eval_counts;

    // Moves the record to a new point, dropping every cached quantity.
    void reset(Vector point);
};

// Evaluates a problem with a one-point cache. Each quantity is produced from,
// in order: an analytic callback, the residual composition formulas, then
// central finite differences.
class Evaluator {
public:
    explicit Evaluator(ProblemDefinition problem);

    const ProblemDefinition& problem() const noexcept { return problem_; }

    // Fills the requested quantities at x. Quantities already cached for the
    // same x are reused and not recounted.
    const EvalRecord& evaluate(const Vector& x, Quantity wanted);

    double value(const Vector& x) { return *evaluate(x, Quantity::Value).f; }
    const Vector& gradient(const Vector& x) { return *evaluate(x, Quantity::Gradient).g; }

    const EvalCounts& counts() const noexcept { return record_.eval_counts; }

private:
    void ensure(Quantity q);

    ProblemDefinition problem_;
    EvalRecord record_;
    bool has_point_ = false;
};

// One-shot evaluation with a fresh evaluator.
EvalRecord evaluate(const ProblemDefinition& p, const Vector& x, Quantity wanted);

// Central differences with h_i = 1e-6 * max(1, |x_i|).
Vector fd_gradient(const ProblemDefinition& p, const Vector& x);
DenseMatrix fd_jacobian(const ProblemDefinition& p, const Vector& x);
// Differences of the gradient (analytic if available), symmetrized. When the
// gradient itself is a finite difference the outer step is 1e-4 * max(1, |x_i|).
DenseMatrix fd_hessian(const ProblemDefinition& p, const Vector& x);

double fd_step(double xi);

}  // namespace newton
