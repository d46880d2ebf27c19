#pragma once

// Generic Newton iteration:
//
//   while (!stop(x_k)) {
//       s      = direction(x_k)
//       lambda = step_length(x_k, s)
//       x_k+1  = x_k + lambda s
//   }
//
// Every named driver is this single loop with a particular set of hooks.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "newton/line_search.hpp"
#include "newton/linear_solvers.hpp"
#include "newton/problem.hpp"
#include "newton/trust_region.hpp"

namespace newton {

struct StoppingCriteria {
    double grad_tol = 1e-8;   // ||g||_inf
    double step_tol = 1e-12;  // ||lambda s||_inf / max(1, ||x||_inf)
    double f_tol = 0.0;       // |delta f| / max(1, |f|); 0 disables
    std::size_t max_iter = 200;

    std::optional<std::pair<std::string, std::string>> violation() const;
};

enum class SolveStatus { Converged, MaxIterations, LineSearchFailed, NumericalBreakdown };
enum class StopReason { None, Gradient, Step, FunctionChange, MaxIterations };

std::string_view to_string(SolveStatus status);
std::string_view to_string(StopReason reason);

struct IterateState {
    std::size_t k = 0;
    Vector x;
    EvalRecord eval;  // holds at least f and g at x
    double lambda = 0.0;
    Vector s;
    double delta_f = 0.0;
    bool last_accepted = true;
};

struct StopVerdict {
    bool stop = false;
    SolveStatus status = SolveStatus::Converged;
    StopReason reason = StopReason::None;
};

// Tests in priority order: gradient, step (k >= 1), function change (k >= 1),
// iteration cap. Step and function-change tests only look at accepted steps.
StopVerdict check_stop(const IterateState& state, const StoppingCriteria& criteria);

struct TraceRow {
    std::size_t k = 0;
    double f = 0.0;
    double grad_norm = 0.0;     // ||g||_inf
    double step_control = 0.0;  // lambda for line-search drivers, radius for trust region
    double dir_norm = 0.0;      // ||s||_2
    bool accepted = true;
    std::string flags;          // e.g. "modified", "indefinite-fallback", "bfgs-skip"

    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct DriverStats {
    std::size_t modified_factorizations = 0;
    std::size_t indefinite_fallbacks = 0;
    std::size_t cg_iterations = 0;
    std::size_t bfgs_updates = 0;
    std::size_t bfgs_skips = 0;
    double max_secant_residual = 0.0;  // max ||B' s - y|| / (1 + ||y||)
    std::size_t rejected_steps = 0;
};

struct SolveResult {
    SolveStatus status = SolveStatus::Converged;
    StopReason reason = StopReason::None;
    Vector x_final;
    double f_final = 0.0;
    double g_norm_final = 0.0;
    std::size_t iterations = 0;
    std::vector<TraceRow> trace;  // iterations + 1 rows, row 0 is x0
    EvalCounts eval_counts;
    DriverStats stats;
    std::string message;
};

struct Direction {
    Vector s;
    std::string flags;
};

struct StepChoice {
    double lambda = 0.0;
    double step_control = 0.0;
    bool accepted = true;
    std::string flags;
};

using DirectionHook = std::function<Direction(const IterateState&, Evaluator&)>;
using StepLengthHook = std::function<StepChoice(const IterateState&, const Direction&, Evaluator&)>;
using StopHook = std::function<StopVerdict(const IterateState&, const StoppingCriteria&)>;

struct NewtonHooks {
    DirectionHook direction;
    StepLengthHook step_length;
    StopHook stop;
    std::shared_ptr<DriverStats> stats;  // written by the hooks, copied into the result
};

// Runs the loop. Hook failures end the run: LineSearchFailed maps to that
// status, any other library error to NumericalBreakdown.
SolveResult newton_iterate(const NewtonHooks& hooks, const ProblemDefinition& p, const Vector& x0,
                           const StoppingCriteria& criteria);

struct BfgsUpdate {
    DenseMatrix matrix;
    bool updated = false;  // false when y^T s <= 1e-10 ||s|| ||y||
};

// B' = B - (B s)(B s)^T / (s^T B s) + y y^T / (y^T s)
BfgsUpdate bfgs_update(const DenseMatrix& b, const Vector& s, const Vector& y);

// Shared between the trust-region direction and step hooks of one run.
struct TrustRegionContext {
    TrustRegionState region;
    QuadraticModel model;
};

namespace hooks {

// Solves H s = -g with the given solver (modified Cholesky keeps s a descent
// direction).
DirectionHook newton_direction(std::shared_ptr<const LinearSolver> solver,
                               std::shared_ptr<DriverStats> stats);
// s = -B^-1 g with B updated from the previous step; B0 = I.
DirectionHook bfgs_direction(std::shared_ptr<DriverStats> stats);
// CG on H s = -g to relative residual `forcing`; steepest descent on negative
// curvature.
DirectionHook truncated_cg_direction(double forcing, std::shared_ptr<DriverStats> stats);
// (J^T J) s = -J^T F, shifted only when J^T J fails Cholesky.
DirectionHook gauss_newton_direction(std::shared_ptr<DriverStats> stats);
DirectionHook trust_region_direction(std::shared_ptr<TrustRegionContext> context,
                                     std::shared_ptr<const SubproblemSolver> subproblem,
                                     std::shared_ptr<DriverStats> stats);

StepLengthHook line_search_step(std::shared_ptr<const AcceptanceCondition> condition,
                                std::shared_ptr<const StepGenerator> generator,
                                LineSearchParams params);
// Unit step when rho >= eta_accept, zero step otherwise; updates the radius.
StepLengthHook trust_region_step(std::shared_ptr<TrustRegionContext> context,
                                 std::shared_ptr<DriverStats> stats);

StopHook standard_stop();

}  // namespace hooks

// Everything a named driver can be configured with.
struct DriverSettings {
    StoppingCriteria criteria;
    LineSearchParams line_search;
    std::string condition = "armijo";
    std::string generator = "backtracking-quadratic";
    std::string subproblem = "dogleg";
    std::string linear_solver = "modified-cholesky";
    TrustRegionState trust_region = TrustRegionState::with_radius(1.0);
    double forcing = 0.1;
};

// Documented defaults per driver: bfgs uses strong-wolfe with cubic
// backtracking, every other line-search driver armijo with quadratic
// backtracking.
DriverSettings default_settings(const std::string& driver);

// The problem each driver iterates on: NE/NLS problems go through the merit
// transform for the objective-based drivers; gauss-newton needs a residual.
ProblemDefinition prepare_problem(const std::string& driver, const ProblemDefinition& p);

// Hook set for a driver name. Throws UnknownComponent (category "drivers").
NewtonHooks make_driver_hooks(const std::string& driver, const DriverSettings& settings);

SolveResult damped_newton_driver(const ProblemDefinition& p, const Vector& x0,
                                 const StoppingCriteria& criteria,
                                 const std::string& condition = "armijo",
                                 const std::string& method = "backtracking-quadratic",
                                 const LineSearchParams& params = {});

SolveResult trust_region_driver(const ProblemDefinition& p, const Vector& x0,
                                const StoppingCriteria& criteria,
                                const std::string& subproblem = "dogleg",
                                const TrustRegionState& region = TrustRegionState::with_radius(1.0));

SolveResult quasi_newton_driver(const ProblemDefinition& p, const Vector& x0,
                                const StoppingCriteria& criteria,
                                const std::string& condition = "strong-wolfe",
                                const std::string& method = "backtracking-cubic",
                                const LineSearchParams& params = {});

SolveResult inexact_newton_driver(const ProblemDefinition& p, const Vector& x0,
                                  const StoppingCriteria& criteria, double forcing = 0.1,
                                  const LineSearchParams& params = {});

SolveResult gauss_newton_driver(const ProblemDefinition& p, const Vector& x0,
                                const StoppingCriteria& criteria,
                                const std::string& condition = "armijo",
                                const std::string& method = "backtracking-quadratic",
                                const LineSearchParams& params = {});

// Runs a named driver with full settings.
SolveResult run_driver(const std::string& driver, const ProblemDefinition& p, const Vector& x0,
                       const DriverSettings& settings);

}  // namespace newton
