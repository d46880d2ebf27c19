#include "newton/linear_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace newton {

namespace {

constexpr double kPivotRelTol = 1e-14;
constexpr double kSymmetryTol = 1e-10;
constexpr double kInitialShiftFactor = 1e-3;
constexpr int kMaxShiftDoublings = 1100;

void check_square_system(const DenseMatrix& a, const Vector& b, const char* who) {
    if (!a.square()) {
        throw DimensionMismatch(std::string(who) + ": matrix is " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()));
    }
    if (b.size() != a.rows()) {
        throw DimensionMismatch(std::string(who) + ": rhs has length " + std::to_string(b.size()) +
                                ", expected " + std::to_string(a.rows()));
    }
    if (!a.all_finite() || !all_finite(b)) {
        throw NonFiniteValue(std::string(who) + ": non-finite entries in the system");
    }
}

double residual_norm(const DenseMatrix& a, const Vector& x, const Vector& b) {
    return norm2(subtract(multiply(a, x), b));
}

// Solves L L^T x = b given the lower factor.
Vector cholesky_substitute(const DenseMatrix& lower, const Vector& b) {
    const std::size_t n = b.size();
    Vector y(b);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) y[i] -= lower(i, k) * y[k];
        y[i] /= lower(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t k = ii + 1; k < n; ++k) y[ii] -= lower(k, ii) * y[k];
        y[ii] /= lower(ii, ii);
    }
    return y;
}

}  // namespace

LinearSolveReport solve_lu(const DenseMatrix& a, const Vector& b) {
    check_square_system(a, b, "solve_lu");
    const std::size_t n = a.rows();
    const double scale = a.norm_inf();
    const double threshold = kPivotRelTol * scale;
    if (scale == 0.0 && n > 0) throw SingularMatrix("solve_lu: zero matrix");

    DenseMatrix lu = a;
    Vector x = b;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(pivot, k))) pivot = i;
        if (std::abs(lu(pivot, k)) < threshold || lu(pivot, k) == 0.0) {
            throw SingularMatrix("solve_lu: pivot " + std::to_string(k) + " below threshold");
        }
        if (pivot != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(pivot, j));
            std::swap(x[k], x[pivot]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double factor = lu(i, k) / lu(k, k);
            lu(i, k) = factor;
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= factor * lu(k, j);
            x[i] -= factor * x[k];
        }
    }
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= lu(ii, j) * x[j];
        x[ii] /= lu(ii, ii);
    }

    LinearSolveReport report;
    report.residual_norm = residual_norm(a, x, b);
    report.solution = std::move(x);
    return report;
}

bool try_cholesky(const DenseMatrix& a, DenseMatrix& lower) {
    const std::size_t n = a.rows();
    const double threshold = kPivotRelTol * a.norm_inf();
    lower = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k);
        if (!(d > threshold) || d <= 0.0) return false;
        const double ljj = std::sqrt(d);
        lower(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
            lower(i, j) = s / ljj;
        }
    }
    return true;
}

LinearSolveReport solve_cholesky(const DenseMatrix& a, const Vector& b, bool modify) {
    check_square_system(a, b, "solve_cholesky");
    const double scale = a.norm_inf();
    if (a.asymmetry() > kSymmetryTol * std::max(1.0, scale)) {
        throw NotSymmetric("solve_cholesky: matrix is not symmetric");
    }

    LinearSolveReport report;
    DenseMatrix lower;
    if (try_cholesky(a, lower)) {
        report.solution = cholesky_substitute(lower, b);
        report.residual_norm = residual_norm(a, report.solution, b);
        return report;
    }
    if (!modify) throw NotPositiveDefinite("solve_cholesky: matrix is not positive definite");

    const std::size_t n = a.rows();
    double tau = kInitialShiftFactor * (scale > 0.0 ? scale : 1.0);
    for (int attempt = 0; attempt < kMaxShiftDoublings; ++attempt, tau *= 2.0) {
        DenseMatrix shifted = a;
        for (std::size_t i = 0; i < n; ++i) shifted(i, i) += tau;
        if (try_cholesky(shifted, lower)) {
            report.solution = cholesky_substitute(lower, b);
            report.residual_norm = residual_norm(a, report.solution, b);
            report.modified = true;
            report.shift = tau;
            return report;
        }
    }
    throw NotPositiveDefinite("solve_cholesky: shift schedule exhausted");
}

IndefiniteOperatorAt::IndefiniteOperatorAt(Vector iterate, Vector direction, std::size_t iterations)
    : IndefiniteOperator("solve_cg: non-positive curvature p^T A p <= 0 at iteration " +
                         std::to_string(iterations)),
      iterate_(std::move(iterate)), direction_(std::move(direction)), iterations_(iterations) {}

LinearSolveReport solve_cg(const LinearOperator& a, const Vector& b, double tol,
                           std::size_t max_iter) {
    if (!(tol > 0.0)) throw std::invalid_argument("solve_cg: tolerance must be positive");
    const std::size_t n = b.size();
    if (max_iter == 0) max_iter = n;

    LinearSolveReport report;
    Vector x(n, 0.0);
    const double b_norm = norm2(b);
    if (b_norm == 0.0) {
        report.solution = std::move(x);
        return report;
    }

    Vector r = b;
    Vector p = r;
    double rr = dot(r, r);
    std::size_t k = 0;
    while (k < max_iter) {
        const Vector ap = a(p);
        const double curvature = dot(p, ap);
        if (curvature <= 0.0) throw IndefiniteOperatorAt(x, p, k);
        const double alpha = rr / curvature;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        ++k;
        const double rr_next = dot(r, r);
        if (std::sqrt(rr_next) <= tol * b_norm) break;
        const double beta = rr_next / rr;
        rr = rr_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }

    report.iterations = k;
    report.residual_norm = norm2(subtract(a(x), b));
    report.solution = std::move(x);
    return report;
}

LinearSolveReport solve_cg(const DenseMatrix& a, const Vector& b, double tol, std::size_t max_iter) {
    check_square_system(a, b, "solve_cg");
    return solve_cg([&a](const Vector& v) { return multiply(a, v); }, b, tol, max_iter);
}

LinearSolveReport CallableSolverAdapter::solve(const DenseMatrix& a, const Vector& b) const {
    check_square_system(a, b, name_.c_str());
    Vector x(b.size(), 0.0);
    const int status = routine_(b.size(), a.data().data(), b.data(), x.data());
    if (status != 0) {
        throw SingularMatrix(name_ + ": external routine returned status " + std::to_string(status));
    }
    LinearSolveReport report;
    report.residual_norm = norm2(subtract(multiply(a, x), b));
    report.solution = std::move(x);
    return report;
}

}  // namespace newton
