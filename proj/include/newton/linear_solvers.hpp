#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include "newton/errors.hpp"
#include "newton/linalg.hpp"

namespace newton {

struct LinearSolveReport {
    Vector solution;
    std::size_t iterations = 0;  // 0 for direct methods
    double residual_norm = 0.0;  // ||A x - b|| against the unmodified A
    bool modified = false;       // A was shifted to A + shift*I before factoring
    double shift = 0.0;
};

// Partial-pivoting LU. Throws SingularMatrix when a pivot falls below
// 1e-14 * ||A||_inf.
LinearSolveReport solve_lu(const DenseMatrix& a, const Vector& b);

// Cholesky of a symmetric A. With modify=true an indefinite A is shifted by
// tau*I, tau starting at 1e-3*||A||_inf and doubling until the factorization
// succeeds.
LinearSolveReport solve_cholesky(const DenseMatrix& a, const Vector& b, bool modify);

// Writes the lower-triangular factor into `lower` and returns true when A is
// numerically positive definite (every pivot above 1e-14 * ||A||_inf).
bool try_cholesky(const DenseMatrix& a, DenseMatrix& lower);

using LinearOperator = std::function<Vector(const Vector&)>;

// Thrown by solve_cg when p^T A p <= 0. Carries the iterate reached so far and
// the offending direction so callers can act on the negative curvature.
class IndefiniteOperatorAt : public IndefiniteOperator {
public:
    IndefiniteOperatorAt(Vector iterate, Vector direction, std::size_t iterations);
    const Vector& iterate() const noexcept { return iterate_; }
    const Vector& direction() const noexcept { return direction_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    Vector iterate_;
    Vector direction_;
    std::size_t iterations_;
};

// Conjugate gradient from x0 = 0, stopping at ||A x - b|| <= tol * ||b|| or
// after max_iter iterations (0 means n).
LinearSolveReport solve_cg(const LinearOperator& a, const Vector& b, double tol,
                           std::size_t max_iter = 0);
LinearSolveReport solve_cg(const DenseMatrix& a, const Vector& b, double tol,
                           std::size_t max_iter = 0);

using SolverConfigMap = std::map<std::string, double>;

// Uniform solve contract. Built-in solvers and wrapped external packages both
// sit behind this interface.
class LinearSolver {
public:
    virtual ~LinearSolver() = default;
    virtual std::string name() const = 0;
    virtual LinearSolveReport solve(const DenseMatrix& a, const Vector& b) const = 0;
};

class LuSolver final : public LinearSolver {
public:
    std::string name() const override { return "lu"; }
    LinearSolveReport solve(const DenseMatrix& a, const Vector& b) const override {
        return solve_lu(a, b);
    }
};

class CholeskySolver final : public LinearSolver {
public:
    explicit CholeskySolver(bool modify) : modify_(modify) {}
    std::string name() const override { return modify_ ? "modified-cholesky" : "cholesky"; }
    LinearSolveReport solve(const DenseMatrix& a, const Vector& b) const override {
        return solve_cholesky(a, b, modify_);
    }
    bool modifies() const noexcept { return modify_; }

private:
    bool modify_;
};

class CgSolver final : public LinearSolver {
public:
    CgSolver(double tol, std::size_t max_iter) : tol_(tol), max_iter_(max_iter) {}
    std::string name() const override { return "cg"; }
    LinearSolveReport solve(const DenseMatrix& a, const Vector& b) const override {
        return solve_cg(a, b, tol_, max_iter_);
    }
    double tolerance() const noexcept { return tol_; }

private:
    double tol_;
    std::size_t max_iter_;
};

// Wraps a routine with a C-style calling convention, the shape most external
// dense packages expose: status = routine(n, a_row_major, b, x_out).
// A nonzero status is reported as SingularMatrix.
class CallableSolverAdapter final : public LinearSolver {
public:
    using Routine = std::function<int(std::size_t n, const double* a, const double* b, double* x)>;

    CallableSolverAdapter(std::string name, Routine routine)
        : name_(std::move(name)), routine_(std::move(routine)) {}
    std::string name() const override { return name_; }
    LinearSolveReport solve(const DenseMatrix& a, const Vector& b) const override;

private:
    std::string name_;
    Routine routine_;
};

// Resolves a linear solver by registered name through the component registry.
// Throws UnknownSolver for unregistered names.
std::shared_ptr<const LinearSolver> external_solver_adapter(const std::string& name,
                                                            const SolverConfigMap& config = {});

}  // namespace newton
