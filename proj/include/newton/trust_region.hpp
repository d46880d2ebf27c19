#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "newton/linalg.hpp"

namespace newton {

// m(s) = f0 + g^T s + 1/2 s^T H s
struct QuadraticModel {
    double f0 = 0.0;
    Vector g;
    DenseMatrix H;
};

double model_value(const QuadraticModel& qm, const Vector& s);

struct TrustRegionState {
    double radius = 1.0;
    double max_radius = 1e3;
    double eta_accept = 0.1;
    double eta_shrink = 0.25;  // rho below this shrinks the region
    double eta_expand = 0.75;  // rho above this (on a boundary step) expands it
    double shrink_factor = 0.25;
    double expand_factor = 2.0;
    double last_rho = 0.0;

    // Defaults with max_radius = 1e3 * initial_radius.
    static TrustRegionState with_radius(double initial_radius);

    std::optional<std::pair<std::string, std::string>> violation() const;
};

// -tau (radius/||g||) g with tau = 1 for g^T H g <= 0, else
// min(1, ||g||^3 / (radius g^T H g)). Throws ZeroGradient.
Vector cauchy_point(const QuadraticModel& qm, double radius);

// Dogleg path from the unconstrained steepest-descent minimizer to the Newton
// step, cut at the boundary. newton_step must satisfy ||H s + g|| <= 1e-6 ||g||
// (BadNewtonStep otherwise).
Vector dogleg_step(const QuadraticModel& qm, double radius, const Vector& newton_step);

// Minimizes the model over span{g, newton_step} intersected with the ball.
// Falls back to dogleg_step when the two vectors are (nearly) parallel.
Vector subspace_2d_step(const QuadraticModel& qm, double radius, const Vector& newton_step);

struct AgreementRatio {
    double rho = 0.0;
    bool degenerate = false;  // predicted reduction ~ 0; rho is -infinity
};

AgreementRatio agreement_ratio(double f_old, double f_new, const QuadraticModel& qm, const Vector& s);

struct RadiusUpdate {
    TrustRegionState state;
    bool accepted = false;
};

RadiusUpdate update_radius(const TrustRegionState& state, double rho, double step_norm);

// A named subproblem solver. The Newton step is optional because the Cauchy
// solver ignores it.
class SubproblemSolver {
public:
    virtual ~SubproblemSolver() = default;
    virtual std::string name() const = 0;
    virtual bool needs_newton_step() const = 0;
    virtual Vector solve(const QuadraticModel& qm, double radius,
                         const Vector* newton_step) const = 0;
};

// Throws UnknownStrategy (category "subproblems").
std::shared_ptr<const SubproblemSolver> make_subproblem(const std::string& name);

}  // namespace newton
