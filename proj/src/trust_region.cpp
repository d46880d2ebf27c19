#include "newton/trust_region.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "newton/errors.hpp"

namespace newton {

namespace {

constexpr double kNewtonResidualTol = 1e-6;
constexpr double kParallelTol = 1e-8;
constexpr int kAngleGrid = 64;
constexpr double kAngleTol = 1e-10;
constexpr int kMaxPolish = 50;

void check_model(const QuadraticModel& qm) {
    if (qm.H.rows() != qm.g.size() || qm.H.cols() != qm.g.size()) {
        throw DimensionMismatch("quadratic model: H is not n x n for the gradient length");
    }
}

void check_newton_step(const QuadraticModel& qm, const Vector& newton_step) {
    if (newton_step.size() != qm.g.size()) throw DimensionMismatch("newton step has wrong length");
    const double residual = norm2(add(multiply(qm.H, newton_step), qm.g));
    if (residual > kNewtonResidualTol * norm2(qm.g)) {
        throw BadNewtonStep("newton step does not solve H s = -g (residual " +
                            std::to_string(residual) + ")");
    }
}

Vector clipped_steepest_descent(const Vector& g, double radius) {
    return scaled(-radius / norm2(g), g);
}

// 2x2 reduced model value on the circle of the given radius at angle theta.
struct CircleModel {
    std::array<double, 2> g;
    std::array<std::array<double, 2>, 2> h;
    double radius;

    double value(double theta) const {
        const double c = std::cos(theta), s = std::sin(theta);
        const double lin = g[0] * c + g[1] * s;
        const double quad = h[0][0] * c * c + 2.0 * h[0][1] * c * s + h[1][1] * s * s;
        return radius * lin + 0.5 * radius * radius * quad;
    }
    double derivative(double theta) const {
        const double c = std::cos(theta), s = std::sin(theta);
        const double lin = -g[0] * s + g[1] * c;
        // d/dtheta of u^T H u = 2 u'^T H u
        const double quad = (h[1][1] - h[0][0]) * 2.0 * s * c + 2.0 * h[0][1] * (c * c - s * s);
        return radius * lin + 0.5 * radius * radius * quad;
    }
    double second_derivative(double theta) const {
        const double c = std::cos(theta), s = std::sin(theta);
        const double lin = -g[0] * c - g[1] * s;
        const double quad = (h[1][1] - h[0][0]) * 2.0 * (c * c - s * s) - 8.0 * h[0][1] * s * c;
        return radius * lin + 0.5 * radius * radius * quad;
    }
};

double polish_angle(const CircleModel& model, double theta) {
    double best = model.value(theta);
    for (int it = 0; it < kMaxPolish; ++it) {
        const double curvature = model.second_derivative(theta);
        if (!(curvature > 0.0)) break;
        const double step = model.derivative(theta) / curvature;
        const double candidate = theta - step;
        const double value = model.value(candidate);
        if (value > best) break;
        theta = candidate;
        best = value;
        if (std::abs(step) < kAngleTol) break;
    }
    return theta;
}

}  // namespace

double model_value(const QuadraticModel& qm, const Vector& s) {
    check_model(qm);
    return qm.f0 + dot(qm.g, s) + 0.5 * quadratic_form(qm.H, s);
}

TrustRegionState TrustRegionState::with_radius(double initial_radius) {
    TrustRegionState state;
    state.radius = initial_radius;
    state.max_radius = 1e3 * initial_radius;
    return state;
}

std::optional<std::pair<std::string, std::string>> TrustRegionState::violation() const {
    auto bad = [](const char* key, const char* why) {
        return std::optional<std::pair<std::string, std::string>>(std::in_place, key, why);
    };
    if (!std::isfinite(radius) || !(radius > 0.0)) return bad("delta0", "radius must be positive");
    if (!std::isfinite(max_radius) || !(max_radius >= radius)) {
        return bad("delta_max", "need 0 < radius <= max radius");
    }
    if (!(eta_accept > 0.0)) return bad("eta_accept", "need eta_accept > 0");
    if (!(eta_shrink >= eta_accept)) return bad("eta1", "need eta_accept <= eta1");
    if (!(eta_expand > eta_shrink)) return bad("eta2", "need eta1 < eta2");
    if (!(eta_expand < 1.0)) return bad("eta2", "need eta2 < 1");
    if (!(shrink_factor > 0.0) || !(shrink_factor < 1.0)) {
        return bad("shrink_factor", "need 0 < shrink < 1");
    }
    if (!(expand_factor > 1.0)) return bad("expand_factor", "need expand > 1");
    return std::nullopt;
}

Vector cauchy_point(const QuadraticModel& qm, double radius) {
    check_model(qm);
    if (!(radius > 0.0)) throw std::invalid_argument("cauchy_point: radius must be positive");
    const double gnorm = norm2(qm.g);
    if (gnorm == 0.0) throw ZeroGradient("cauchy_point: gradient is zero");
    const double curvature = quadratic_form(qm.H, qm.g);
    double tau = 1.0;
    if (curvature > 0.0) tau = std::min(1.0, gnorm * gnorm * gnorm / (radius * curvature));
    return scaled(-tau * radius / gnorm, qm.g);
}

Vector dogleg_step(const QuadraticModel& qm, double radius, const Vector& newton_step) {
    check_model(qm);
    if (!(radius > 0.0)) throw std::invalid_argument("dogleg_step: radius must be positive");
    const double gnorm = norm2(qm.g);
    if (gnorm == 0.0) throw ZeroGradient("dogleg_step: gradient is zero");
    check_newton_step(qm, newton_step);

    if (norm2(newton_step) <= radius) return newton_step;

    const double curvature = quadratic_form(qm.H, qm.g);
    if (!(curvature > 0.0)) return clipped_steepest_descent(qm.g, radius);
    const Vector s_u = scaled(-gnorm * gnorm / curvature, qm.g);
    const double su_norm = norm2(s_u);
    if (su_norm >= radius) return clipped_steepest_descent(qm.g, radius);

    // ||s_u + t d||^2 = radius^2, positive root.
    const Vector d = subtract(newton_step, s_u);
    const double a = dot(d, d);
    const double b = 2.0 * dot(s_u, d);
    const double c = su_norm * su_norm - radius * radius;
    const double root = std::sqrt(b * b - 4.0 * a * c);
    const double t = b >= 0.0 ? -2.0 * c / (b + root) : (-b + root) / (2.0 * a);
    return axpy(t, d, s_u);
}

Vector subspace_2d_step(const QuadraticModel& qm, double radius, const Vector& newton_step) {
    check_model(qm);
    if (!(radius > 0.0)) throw std::invalid_argument("subspace_2d_step: radius must be positive");
    const double gnorm = norm2(qm.g);
    if (gnorm == 0.0) throw ZeroGradient("subspace_2d_step: gradient is zero");
    check_newton_step(qm, newton_step);

    const double newton_norm = norm2(newton_step);
    if (newton_norm <= radius) return newton_step;

    // Orthonormal basis {v1, v2} of span{g, newton_step}.
    const Vector v1 = scaled(1.0 / gnorm, qm.g);
    const Vector w = axpy(-dot(v1, newton_step), v1, newton_step);
    const double w_norm = norm2(w);
    if (w_norm <= kParallelTol * newton_norm) return dogleg_step(qm, radius, newton_step);
    const Vector v2 = scaled(1.0 / w_norm, w);

    const Vector hv1 = multiply(qm.H, v1);
    const Vector hv2 = multiply(qm.H, v2);
    CircleModel model;
    model.g = {dot(v1, qm.g), dot(v2, qm.g)};
    const double h12 = 0.5 * (dot(v1, hv2) + dot(v2, hv1));
    model.h = {{{dot(v1, hv1), h12}, {h12, dot(v2, hv2)}}};
    model.radius = radius;

    auto embed = [&](double z1, double z2) {
        Vector s = axpy(z2, v2, scaled(z1, v1));
        const double norm = norm2(s);
        if (norm > radius) s = scaled(radius / norm, s);
        return s;
    };

    // Interior stationary point of the reduced model.
    const double det = model.h[0][0] * model.h[1][1] - h12 * h12;
    if (model.h[0][0] > 0.0 && det > 0.0) {
        const double z1 = -(model.h[1][1] * model.g[0] - h12 * model.g[1]) / det;
        const double z2 = -(-h12 * model.g[0] + model.h[0][0] * model.g[1]) / det;
        if (std::hypot(z1, z2) <= radius) return embed(z1, z2);
    }

    // Boundary: polish every discrete local minimum of a uniform angle grid.
    std::array<double, kAngleGrid> values{};
    const double spacing = 2.0 * std::numbers::pi / kAngleGrid;
    for (int i = 0; i < kAngleGrid; ++i) values[i] = model.value(i * spacing);
    double best_theta = 0.0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kAngleGrid; ++i) {
        const double left = values[(i + kAngleGrid - 1) % kAngleGrid];
        const double right = values[(i + 1) % kAngleGrid];
        if (values[i] > left || values[i] > right) continue;
        const double theta = polish_angle(model, i * spacing);
        const double value = model.value(theta);
        if (value < best_value) {
            best_value = value;
            best_theta = theta;
        }
    }
    return embed(radius * std::cos(best_theta), radius * std::sin(best_theta));
}

AgreementRatio agreement_ratio(double f_old, double f_new, const QuadraticModel& qm, const Vector& s) {
    const double predicted = f_old - model_value(qm, s);
    if (predicted <= 1e-16 * std::max(1.0, std::abs(f_old))) {
        return {-std::numeric_limits<double>::infinity(), true};
    }
    return {(f_old - f_new) / predicted, false};
}

RadiusUpdate update_radius(const TrustRegionState& state, double rho, double step_norm) {
    if (step_norm > state.radius + 1e-12) {
        throw std::invalid_argument("update_radius: step is longer than the radius");
    }
    RadiusUpdate out{state, rho >= state.eta_accept};
    if (rho < state.eta_shrink) {
        out.state.radius = state.shrink_factor * step_norm;
    } else if (rho > state.eta_expand && step_norm >= 0.99 * state.radius) {
        out.state.radius = std::min(state.expand_factor * state.radius, state.max_radius);
    }
    out.state.last_rho = rho;
    return out;
}

namespace {

class CauchySubproblem final : public SubproblemSolver {
public:
    std::string name() const override { return "cauchy"; }
    bool needs_newton_step() const override { return false; }
    Vector solve(const QuadraticModel& qm, double radius, const Vector*) const override {
        return cauchy_point(qm, radius);
    }
};

class DoglegSubproblem final : public SubproblemSolver {
public:
    std::string name() const override { return "dogleg"; }
    bool needs_newton_step() const override { return true; }
    Vector solve(const QuadraticModel& qm, double radius, const Vector* newton) const override {
        if (!newton) throw std::invalid_argument("dogleg needs a newton step");
        return dogleg_step(qm, radius, *newton);
    }
};

class Subspace2dSubproblem final : public SubproblemSolver {
public:
    std::string name() const override { return "subspace-2d"; }
    bool needs_newton_step() const override { return true; }
    Vector solve(const QuadraticModel& qm, double radius, const Vector* newton) const override {
        if (!newton) throw std::invalid_argument("subspace-2d needs a newton step");
        return subspace_2d_step(qm, radius, *newton);
    }
};

}  // namespace

std::shared_ptr<const SubproblemSolver> make_subproblem(const std::string& name) {
    if (name == "cauchy") return std::make_shared<CauchySubproblem>();
    if (name == "dogleg") return std::make_shared<DoglegSubproblem>();
    if (name == "subspace-2d") return std::make_shared<Subspace2dSubproblem>();
    throw UnknownStrategy(name, "subproblems");
}

}  // namespace newton
