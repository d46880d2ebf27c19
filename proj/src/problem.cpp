#include "newton/problem.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "newton/errors.hpp"

namespace newton {

namespace {

constexpr double kFdRelStep = 1e-6;
constexpr double kNestedFdRelStep = 1e-4;

template <typename Fn>
auto guarded(const std::string& what, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw EvaluationError(what + " callback failed: " + e.what());
    }
}

double call_objective(const ProblemDefinition& p, const Vector& x);

Vector call_residual(const ProblemDefinition& p, const Vector& x) {
    if (!p.residual) throw KindError("problem '" + p.name + "' has no residual function");
    Vector r = guarded("residual", [&] { return p.residual(x); });
    if (r.size() != p.m) {
        throw DimensionMismatch("residual of '" + p.name + "' has length " +
                                std::to_string(r.size()) + ", expected " + std::to_string(p.m));
    }
    if (!all_finite(r)) throw NonFiniteValue("residual of '" + p.name + "' is not finite");
    return r;
}

double call_objective(const ProblemDefinition& p, const Vector& x) {
    double f = 0.0;
    if (p.objective) {
        f = guarded("objective", [&] { return p.objective(x); });
    } else {
        f = half_squared_norm(call_residual(p, x));
    }
    if (!std::isfinite(f)) throw NonFiniteValue("objective of '" + p.name + "' is not finite");
    return f;
}

void check_matrix(const DenseMatrix& a, std::size_t rows, std::size_t cols, const std::string& what) {
    if (a.rows() != rows || a.cols() != cols) {
        throw DimensionMismatch(what + " is " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + ", expected " + std::to_string(rows) +
                                "x" + std::to_string(cols));
    }
    if (!a.all_finite()) throw NonFiniteValue(what + " is not finite");
}

Vector call_gradient(const ProblemDefinition& p, const Vector& x) {
    Vector g = guarded("gradient", [&] { return p.gradient(x); });
    if (g.size() != p.n) throw DimensionMismatch("gradient of '" + p.name + "' has wrong length");
    if (!all_finite(g)) throw NonFiniteValue("gradient of '" + p.name + "' is not finite");
    return g;
}

DenseMatrix call_jacobian(const ProblemDefinition& p, const Vector& x) {
    DenseMatrix j = guarded("jacobian", [&] { return p.jacobian(x); });
    check_matrix(j, p.m, p.n, "jacobian of '" + p.name + "'");
    return j;
}

DenseMatrix call_hessian(const ProblemDefinition& p, const Vector& x) {
    DenseMatrix h = guarded("hessian", [&] { return p.hessian(x); });
    check_matrix(h, p.n, p.n, "hessian of '" + p.name + "'");
    return h;
}

std::vector<DenseMatrix> call_residual_hessians(const ProblemDefinition& p, const Vector& x) {
    auto hs = guarded("residual hessians", [&] { return p.residual_hessians(x); });
    if (hs.size() != p.m) throw DimensionMismatch("residual hessian count differs from m");
    for (const auto& h : hs) check_matrix(h, p.n, p.n, "residual hessian of '" + p.name + "'");
    return hs;
}

void check_point(const ProblemDefinition& p, const Vector& x) {
    if (x.size() != p.n) {
        throw DimensionMismatch("point has length " + std::to_string(x.size()) + ", problem '" +
                                p.name + "' has n=" + std::to_string(p.n));
    }
}

// Column-wise central differences of a vector-valued map.
template <typename Fn>
DenseMatrix difference_columns(Fn&& fn, const Vector& x, std::size_t rows, double rel_step) {
    const std::size_t n = x.size();
    DenseMatrix out(rows, n);
    for (std::size_t j = 0; j < n; ++j) {
        const double h = rel_step * std::max(1.0, std::abs(x[j]));
        Vector xp = x;
        Vector xm = x;
        xp[j] += h;
        xm[j] -= h;
        const Vector fp = fn(xp);
        const Vector fm = fn(xm);
        for (std::size_t i = 0; i < rows; ++i) out(i, j) = (fp[i] - fm[i]) / (2.0 * h);
    }
    return out;
}

}  // namespace

std::string_view to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::NE: return "NE";
        case ProblemKind::UO: return "UO";
        case ProblemKind::NLS: return "NLS";
    }
    return "?";
}

void validate(const ProblemDefinition& p) {
    if (p.n == 0) throw DimensionMismatch("problem '" + p.name + "' has n = 0");
    switch (p.kind) {
        case ProblemKind::UO:
            if (!p.objective) throw KindError("UO problem '" + p.name + "' needs an objective");
            if (p.residual && !p.transformed_from) {
                throw KindError("UO problem '" + p.name + "' carries a residual");
            }
            break;
        case ProblemKind::NE:
            if (!p.residual) throw KindError("NE problem '" + p.name + "' needs a residual");
            if (p.objective) throw KindError("NE problem '" + p.name + "' carries an objective");
            if (p.m != p.n) {
                throw KindError("NE problem '" + p.name + "' needs m = n, got m=" +
                                std::to_string(p.m) + " n=" + std::to_string(p.n));
            }
            break;
        case ProblemKind::NLS:
            if (!p.residual) throw KindError("NLS problem '" + p.name + "' needs a residual");
            if (p.objective) throw KindError("NLS problem '" + p.name + "' carries an objective");
            if (p.m < p.n) {
                throw KindError("NLS problem '" + p.name + "' needs m >= n, got m=" +
                                std::to_string(p.m) + " n=" + std::to_string(p.n));
            }
            break;
    }
    if (p.jacobian && !p.residual) throw KindError("jacobian given without a residual");
    if (p.residual_hessians && !p.residual) {
        throw KindError("residual hessians given without a residual");
    }
}

ProblemDefinition make_objective_problem(std::string name, std::size_t n, ScalarFunction objective,
                                         VectorFunction gradient, MatrixFunction hessian) {
    ProblemDefinition p;
    p.name = std::move(name);
    p.kind = ProblemKind::UO;
    p.n = n;
    p.objective = std::move(objective);
    p.gradient = std::move(gradient);
    p.hessian = std::move(hessian);
    validate(p);
    return p;
}

ProblemDefinition make_equations_problem(std::string name, std::size_t n, VectorFunction residual,
                                         MatrixFunction jacobian,
                                         MatrixListFunction residual_hessians) {
    ProblemDefinition p;
    p.name = std::move(name);
    p.kind = ProblemKind::NE;
    p.n = n;
    p.m = n;
    p.residual = std::move(residual);
    p.jacobian = std::move(jacobian);
    p.residual_hessians = std::move(residual_hessians);
    validate(p);
    return p;
}

ProblemDefinition make_least_squares_problem(std::string name, std::size_t n, std::size_t m,
                                             VectorFunction residual, MatrixFunction jacobian,
                                             MatrixListFunction residual_hessians) {
    ProblemDefinition p;
    p.name = std::move(name);
    p.kind = ProblemKind::NLS;
    p.n = n;
    p.m = m;
    p.residual = std::move(residual);
    p.jacobian = std::move(jacobian);
    p.residual_hessians = std::move(residual_hessians);
    validate(p);
    return p;
}

ProblemDefinition transform_ne_to_uo(const ProblemDefinition& p) {
    if (p.kind == ProblemKind::UO) {
        throw KindError("problem '" + p.name + "' is already an objective (UO)");
    }
    validate(p);
    ProblemDefinition out = p;
    out.kind = ProblemKind::UO;
    out.transformed_from = p.kind;
    auto residual = p.residual;
    out.objective = [residual](const Vector& x) { return half_squared_norm(residual(x)); };
    out.gradient = {};
    out.hessian = {};
    return out;
}

ProblemDefinition as_least_squares(const ProblemDefinition& p) {
    if (p.kind == ProblemKind::NLS) return p;
    if (p.kind != ProblemKind::NE) {
        throw KindError("problem '" + p.name + "' is not a system of equations");
    }
    ProblemDefinition out = p;
    out.kind = ProblemKind::NLS;
    validate(out);
    return out;
}

double half_squared_norm(const Vector& residual) {
    double sum = 0.0;
    for (double r : residual) sum += r * r;
    return 0.5 * sum;
}

Vector nls_gradient(const DenseMatrix& jacobian, const Vector& residual) {
    if (jacobian.rows() != residual.size()) {
        throw DimensionMismatch("nls_gradient: jacobian has " + std::to_string(jacobian.rows()) +
                                " rows, residual has length " + std::to_string(residual.size()));
    }
    return multiply_transposed(jacobian, residual);
}

DenseMatrix nls_hessian(const DenseMatrix& jacobian, const Vector& residual,
                        std::span<const DenseMatrix> residual_hessians) {
    if (jacobian.rows() != residual.size()) {
        throw DimensionMismatch("nls_hessian: jacobian rows differ from residual length");
    }
    DenseMatrix h = gram(jacobian);
    if (residual_hessians.empty()) return h;
    if (residual_hessians.size() != residual.size()) {
        throw DimensionMismatch("nls_hessian: need one residual hessian per residual component");
    }
    const std::size_t n = jacobian.cols();
    for (std::size_t i = 0; i < residual.size(); ++i) {
        const DenseMatrix& hi = residual_hessians[i];
        if (hi.rows() != n || hi.cols() != n) {
            throw DimensionMismatch("nls_hessian: residual hessian " + std::to_string(i) +
                                    " is not n x n");
        }
        h += residual[i] * hi;
    }
    return h;
}

double fd_step(double xi) { return kFdRelStep * std::max(1.0, std::abs(xi)); }

Vector fd_gradient(const ProblemDefinition& p, const Vector& x) {
    check_point(p, x);
    Vector g(p.n);
    for (std::size_t j = 0; j < p.n; ++j) {
        const double h = fd_step(x[j]);
        Vector xp = x;
        Vector xm = x;
        xp[j] += h;
        xm[j] -= h;
        g[j] = (call_objective(p, xp) - call_objective(p, xm)) / (2.0 * h);
    }
    if (!all_finite(g)) throw NonFiniteValue("finite-difference gradient is not finite");
    return g;
}

DenseMatrix fd_jacobian(const ProblemDefinition& p, const Vector& x) {
    check_point(p, x);
    if (!p.residual) throw KindError("problem '" + p.name + "' has no residual to differentiate");
    DenseMatrix j = difference_columns([&](const Vector& v) { return call_residual(p, v); }, x,
                                       p.m, kFdRelStep);
    if (!j.all_finite()) throw NonFiniteValue("finite-difference jacobian is not finite");
    return j;
}

DenseMatrix fd_hessian(const ProblemDefinition& p, const Vector& x) {
    check_point(p, x);
    DenseMatrix h;
    if (p.gradient) {
        h = difference_columns([&](const Vector& v) { return call_gradient(p, v); }, x, p.n,
                               kFdRelStep);
    } else if (p.residual && p.jacobian) {
        h = difference_columns(
            [&](const Vector& v) { return nls_gradient(call_jacobian(p, v), call_residual(p, v)); },
            x, p.n, kFdRelStep);
    } else {
        h = difference_columns([&](const Vector& v) { return fd_gradient(p, v); }, x, p.n,
                               kNestedFdRelStep);
    }
    if (!h.all_finite()) throw NonFiniteValue("finite-difference hessian is not finite");
    return h.symmetrized();
}

void EvalRecord::reset(Vector point) {
    x = std::move(point);
    f.reset();
    F.reset();
    g.reset();
    J.reset();
    H.reset();
}

Evaluator::Evaluator(ProblemDefinition problem) : problem_(std::move(problem)) {
    validate(problem_);
}

const EvalRecord& Evaluator::evaluate(const Vector& x, Quantity wanted) {
    check_point(problem_, x);
    if (!all_finite(x)) throw NonFiniteValue("evaluation point is not finite");
    if (!has_point_ || record_.x != x) {
        record_.reset(x);
        has_point_ = true;
    }
    for (Quantity q : {Quantity::Value, Quantity::Residual, Quantity::Jacobian, Quantity::Gradient,
                       Quantity::Hessian}) {
        if (has(wanted, q)) ensure(q);
    }
    return record_;
}

void Evaluator::ensure(Quantity q) {
    const ProblemDefinition& p = problem_;
    const Vector& x = record_.x;
    EvalCounts& counts = record_.eval_counts;
    switch (q) {
        case Quantity::Value:
            if (record_.f) return;
            if (p.objective) {
                record_.f = call_objective(p, x);
            } else {
                ensure(Quantity::Residual);
                record_.f = half_squared_norm(*record_.F);
            }
            ++counts.f;
            return;
        case Quantity::Residual:
            if (record_.F) return;
            record_.F = call_residual(p, x);
            ++counts.F;
            return;
        case Quantity::Jacobian:
            if (record_.J) return;
            if (!p.residual) throw KindError("problem '" + p.name + "' has no residual");
            record_.J = p.jacobian ? call_jacobian(p, x) : fd_jacobian(p, x);
            ++counts.J;
            return;
        case Quantity::Gradient:
            if (record_.g) return;
            if (p.gradient) {
                record_.g = call_gradient(p, x);
            } else if (p.residual) {
                ensure(Quantity::Residual);
                ensure(Quantity::Jacobian);
                record_.g = nls_gradient(*record_.J, *record_.F);
            } else {
                record_.g = fd_gradient(p, x);
            }
            ++counts.g;
            return;
        case Quantity::Hessian: {
            if (record_.H) return;
            DenseMatrix h;
            if (p.hessian) {
                h = call_hessian(p, x);
            } else if (p.residual) {
                ensure(Quantity::Residual);
                ensure(Quantity::Jacobian);
                if (p.residual_hessians) {
                    const auto hs = call_residual_hessians(p, x);
                    h = nls_hessian(*record_.J, *record_.F, hs);
                } else {
                    h = nls_hessian(*record_.J, *record_.F);
                }
            } else {
                h = fd_hessian(p, x);
            }
            record_.H = h.symmetrized();
            ++counts.H;
            return;
        }
        case Quantity::None:
            return;
    }
}

EvalRecord evaluate(const ProblemDefinition& p, const Vector& x, Quantity wanted) {
    Evaluator evaluator(p);
    return evaluator.evaluate(x, wanted);
}

}  // namespace newton
