#include "newton/drivers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "newton/errors.hpp"
#include "newton/registry.hpp"

namespace newton {

namespace {

constexpr double kBfgsCurvatureTol = 1e-10;
constexpr double kMinRadius = 1e-14;

void append_flag(std::string& flags, std::string_view flag) {
    if (!flags.empty()) flags += ';';
    flags += flag;
}

TraceRow make_row(const IterateState& state, double step_control, double dir_norm, bool accepted,
                  std::string flags) {
    return {state.k,          *state.eval.f, norm_inf(*state.eval.g), step_control, dir_norm,
            accepted,         std::move(flags)};
}

}  // namespace

std::optional<std::pair<std::string, std::string>> StoppingCriteria::violation() const {
    auto bad = [](const char* key, const char* why) {
        return std::optional<std::pair<std::string, std::string>>(std::in_place, key, why);
    };
    if (!(grad_tol >= 0.0) || !std::isfinite(grad_tol)) return bad("grad_tol", "need grad_tol >= 0");
    if (!(step_tol >= 0.0) || !std::isfinite(step_tol)) return bad("step_tol", "need step_tol >= 0");
    if (!(f_tol >= 0.0) || !std::isfinite(f_tol)) return bad("f_tol", "need f_tol >= 0");
    if (max_iter < 1) return bad("max_iter", "need max_iter >= 1");
    return std::nullopt;
}

std::string_view to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::MaxIterations: return "MaxIterations";
        case SolveStatus::LineSearchFailed: return "LineSearchFailed";
        case SolveStatus::NumericalBreakdown: return "NumericalBreakdown";
    }
    return "?";
}

std::string_view to_string(StopReason reason) {
    switch (reason) {
        case StopReason::None: return "none";
        case StopReason::Gradient: return "gradient";
        case StopReason::Step: return "step";
        case StopReason::FunctionChange: return "function-change";
        case StopReason::MaxIterations: return "max-iterations";
    }
    return "?";
}

StopVerdict check_stop(const IterateState& state, const StoppingCriteria& criteria) {
    if (state.eval.g && norm_inf(*state.eval.g) <= criteria.grad_tol) {
        return {true, SolveStatus::Converged, StopReason::Gradient};
    }
    if (state.k >= 1 && state.last_accepted) {
        const double step = std::abs(state.lambda) * norm_inf(state.s);
        if (step / std::max(1.0, norm_inf(state.x)) <= criteria.step_tol) {
            return {true, SolveStatus::Converged, StopReason::Step};
        }
        if (criteria.f_tol > 0.0 && state.eval.f &&
            std::abs(state.delta_f) <= criteria.f_tol * std::max(1.0, std::abs(*state.eval.f))) {
            return {true, SolveStatus::Converged, StopReason::FunctionChange};
        }
    }
    if (state.k >= criteria.max_iter) {
        return {true, SolveStatus::MaxIterations, StopReason::MaxIterations};
    }
    return {};
}

SolveResult newton_iterate(const NewtonHooks& hooks, const ProblemDefinition& p, const Vector& x0,
                           const StoppingCriteria& criteria) {
    if (!hooks.direction || !hooks.step_length || !hooks.stop) {
        throw std::invalid_argument("newton_iterate: every hook must be set");
    }
    if (x0.size() != p.n) {
        throw DimensionMismatch("x0 has length " + std::to_string(x0.size()) + ", problem '" +
                                p.name + "' has n=" + std::to_string(p.n));
    }

    Evaluator evaluator(p);
    const Quantity basic = Quantity::Value | Quantity::Gradient;

    IterateState state;
    state.x = x0;
    state.eval = evaluator.evaluate(x0, basic);

    SolveResult result;
    result.trace.push_back(make_row(state, 0.0, 0.0, true, {}));

    while (true) {
        const StopVerdict verdict = hooks.stop(state, criteria);
        if (verdict.stop) {
            result.status = verdict.status;
            result.reason = verdict.reason;
            break;
        }

        Direction direction;
        StepChoice step;
        Vector x_next;
        EvalRecord next_eval;
        try {
            direction = hooks.direction(state, evaluator);
            step = hooks.step_length(state, direction, evaluator);
            if (step.lambda != 0.0) {
                x_next = axpy(step.lambda, direction.s, state.x);
                next_eval = evaluator.evaluate(x_next, basic);
            }
        } catch (const LineSearchFailed& e) {
            result.status = SolveStatus::LineSearchFailed;
            result.message = "iteration " + std::to_string(state.k) + ": " + e.what();
            break;
        } catch (const Error& e) {
            result.status = SolveStatus::NumericalBreakdown;
            result.message = "iteration " + std::to_string(state.k) + ": " + e.what();
            break;
        }

        const double f_before = *state.eval.f;
        if (step.lambda != 0.0) {
            state.x = std::move(x_next);
            state.eval = std::move(next_eval);
        }
        ++state.k;
        state.lambda = step.lambda;
        state.s = direction.s;
        state.delta_f = *state.eval.f - f_before;
        state.last_accepted = step.accepted;

        std::string flags = direction.flags;
        if (!step.flags.empty()) append_flag(flags, step.flags);
        result.trace.push_back(
            make_row(state, step.step_control, norm2(direction.s), step.accepted, std::move(flags)));
    }

    result.x_final = state.x;
    result.f_final = *state.eval.f;
    result.g_norm_final = norm_inf(*state.eval.g);
    result.iterations = state.k;
    result.eval_counts = evaluator.counts();
    if (hooks.stats) result.stats = *hooks.stats;
    return result;
}

BfgsUpdate bfgs_update(const DenseMatrix& b, const Vector& s, const Vector& y) {
    if (!b.square() || b.rows() != s.size() || s.size() != y.size()) {
        throw DimensionMismatch("bfgs_update: inconsistent sizes");
    }
    const double ys = dot(y, s);
    if (!(ys > kBfgsCurvatureTol * norm2(s) * norm2(y))) return {b, false};
    const Vector bs = multiply(b, s);
    const double sbs = dot(s, bs);
    if (!(sbs > 0.0)) return {b, false};
    DenseMatrix next = b;
    next += (-1.0 / sbs) * DenseMatrix::outer(bs, bs);
    next += (1.0 / ys) * DenseMatrix::outer(y, y);
    return {std::move(next), true};
}

namespace hooks {

DirectionHook newton_direction(std::shared_ptr<const LinearSolver> solver,
                               std::shared_ptr<DriverStats> stats) {
    return [solver = std::move(solver), stats = std::move(stats)](const IterateState& state,
                                                                  Evaluator& evaluator) {
        const EvalRecord& rec = evaluator.evaluate(state.x, Quantity::Gradient | Quantity::Hessian);
        const LinearSolveReport report = solver->solve(*rec.H, negated(*rec.g));
        Direction d{report.solution, {}};
        if (report.modified) {
            append_flag(d.flags, "modified");
            if (stats) ++stats->modified_factorizations;
        }
        return d;
    };
}

DirectionHook bfgs_direction(std::shared_ptr<DriverStats> stats) {
    struct Memory {
        std::optional<DenseMatrix> b;
        Vector x_prev;
        Vector g_prev;
    };
    auto memory = std::make_shared<Memory>();
    return [memory, stats = std::move(stats)](const IterateState& state, Evaluator&) {
        const Vector& g = *state.eval.g;
        Direction d;
        if (!memory->b) {
            memory->b = DenseMatrix::identity(g.size());
        } else {
            const Vector s = subtract(state.x, memory->x_prev);
            const Vector y = subtract(g, memory->g_prev);
            BfgsUpdate update = bfgs_update(*memory->b, s, y);
            if (update.updated) {
                const double secant = norm2(subtract(multiply(update.matrix, s), y));
                if (stats) {
                    ++stats->bfgs_updates;
                    stats->max_secant_residual =
                        std::max(stats->max_secant_residual, secant / (1.0 + norm2(y)));
                }
                memory->b = std::move(update.matrix);
            } else {
                append_flag(d.flags, "bfgs-skip");
                if (stats) ++stats->bfgs_skips;
            }
        }
        memory->x_prev = state.x;
        memory->g_prev = g;
        try {
            d.s = solve_cholesky(*memory->b, negated(g), false).solution;
        } catch (const NotPositiveDefinite&) {
            throw NumericalBreakdown("bfgs: Hessian approximation lost positive definiteness");
        }
        return d;
    };
}

DirectionHook truncated_cg_direction(double forcing, std::shared_ptr<DriverStats> stats) {
    return [forcing, stats = std::move(stats)](const IterateState& state, Evaluator& evaluator) {
        const EvalRecord& rec = evaluator.evaluate(state.x, Quantity::Gradient | Quantity::Hessian);
        const Vector& g = *rec.g;
        Direction d;
        try {
            const LinearSolveReport report = solve_cg(*rec.H, negated(g), forcing);
            if (stats) stats->cg_iterations += report.iterations;
            d.s = report.solution;
        } catch (const IndefiniteOperatorAt& e) {
            if (stats) {
                stats->cg_iterations += e.iterations();
                ++stats->indefinite_fallbacks;
            }
            d.s = negated(g);
            append_flag(d.flags, "indefinite-fallback");
        }
        return d;
    };
}

DirectionHook gauss_newton_direction(std::shared_ptr<DriverStats> stats) {
    return [stats = std::move(stats)](const IterateState& state, Evaluator& evaluator) {
        const EvalRecord& rec = evaluator.evaluate(state.x, Quantity::Residual | Quantity::Jacobian);
        const DenseMatrix normal = gram(*rec.J);
        const Vector rhs = negated(nls_gradient(*rec.J, *rec.F));
        Direction d;
        try {
            d.s = solve_cholesky(normal, rhs, false).solution;
        } catch (const NotPositiveDefinite&) {
            d.s = solve_cholesky(normal, rhs, true).solution;
            append_flag(d.flags, "modified");
            if (stats) ++stats->modified_factorizations;
        }
        return d;
    };
}

DirectionHook trust_region_direction(std::shared_ptr<TrustRegionContext> context,
                                     std::shared_ptr<const SubproblemSolver> subproblem,
                                     std::shared_ptr<DriverStats> stats) {
    return [context = std::move(context), subproblem = std::move(subproblem),
            stats = std::move(stats)](const IterateState& state, Evaluator& evaluator) {
        const EvalRecord& rec = evaluator.evaluate(state.x, Quantity::Gradient | Quantity::Hessian);
        QuadraticModel model{*rec.f, *rec.g, *rec.H};
        Direction d;
        Vector newton_step;
        if (subproblem->needs_newton_step()) {
            const LinearSolveReport report = solve_cholesky(model.H, negated(model.g), true);
            if (report.modified) {
                // The model carries the shifted Hessian so the Newton step is
                // its exact minimizer.
                for (std::size_t i = 0; i < model.H.rows(); ++i) model.H(i, i) += report.shift;
                append_flag(d.flags, "modified");
                if (stats) ++stats->modified_factorizations;
            }
            newton_step = report.solution;
        }
        d.s = subproblem->solve(model, context->region.radius,
                                subproblem->needs_newton_step() ? &newton_step : nullptr);
        context->model = std::move(model);
        return d;
    };
}

StepLengthHook line_search_step(std::shared_ptr<const AcceptanceCondition> condition,
                                std::shared_ptr<const StepGenerator> generator,
                                LineSearchParams params) {
    return [condition = std::move(condition), generator = std::move(generator),
            params](const IterateState& state, const Direction& d, Evaluator& evaluator) {
        const Vector& x = state.x;
        const Vector& s = d.s;
        LineFunction lf;
        lf.phi = [&](double lambda) {
            try {
                return evaluator.value(axpy(lambda, s, x));
            } catch (const NonFiniteValue&) {
                return std::numeric_limits<double>::infinity();
            }
        };
        lf.dphi = [&](double lambda) { return dot(evaluator.gradient(axpy(lambda, s, x)), s); };
        lf.f0 = *state.eval.f;
        lf.slope0 = dot(*state.eval.g, s);
        const LineSearchResult found = line_search(lf, *condition, *generator, params);
        return StepChoice{found.lambda, found.lambda, true, {}};
    };
}

StepLengthHook trust_region_step(std::shared_ptr<TrustRegionContext> context,
                                 std::shared_ptr<DriverStats> stats) {
    return [context = std::move(context), stats = std::move(stats)](
               const IterateState& state, const Direction& d, Evaluator& evaluator) {
        const double f_old = *state.eval.f;
        double f_new = std::numeric_limits<double>::infinity();
        try {
            f_new = evaluator.value(add(state.x, d.s));
        } catch (const NonFiniteValue&) {
        }
        const AgreementRatio ratio = agreement_ratio(f_old, f_new, context->model, d.s);
        const double radius = context->region.radius;
        const RadiusUpdate update = update_radius(context->region, ratio.rho, norm2(d.s));
        context->region = update.state;

        StepChoice choice{update.accepted ? 1.0 : 0.0, radius, update.accepted, {}};
        if (ratio.degenerate) append_flag(choice.flags, "degenerate-ratio");
        if (!update.accepted && stats) ++stats->rejected_steps;
        if (context->region.radius < kMinRadius) {
            throw NumericalBreakdown("trust region radius collapsed below 1e-14");
        }
        return choice;
    };
}

StopHook standard_stop() { return check_stop; }

}  // namespace hooks

DriverSettings default_settings(const std::string& driver) {
    DriverSettings settings;
    if (driver == "bfgs") {
        settings.condition = "strong-wolfe";
        settings.generator = "backtracking-cubic";
    }
    return settings;
}

ProblemDefinition prepare_problem(const std::string& driver, const ProblemDefinition& p) {
    if (driver == "gauss-newton") {
        if (!p.has_residual()) {
            throw KindError("gauss-newton needs a residual; problem '" + p.name + "' is " +
                            std::string(to_string(p.kind)));
        }
        if (p.kind == ProblemKind::NE) return as_least_squares(p);
        validate(p);
        return p;
    }
    if (p.kind == ProblemKind::UO) {
        validate(p);
        return p;
    }
    return transform_ne_to_uo(p);
}

NewtonHooks make_driver_hooks(const std::string& driver, const DriverSettings& settings) {
    return ComponentRegistry::instance().driver(driver, settings);
}

SolveResult run_driver(const std::string& driver, const ProblemDefinition& p, const Vector& x0,
                       const DriverSettings& settings) {
    const NewtonHooks hooks = make_driver_hooks(driver, settings);
    return newton_iterate(hooks, prepare_problem(driver, p), x0, settings.criteria);
}

SolveResult damped_newton_driver(const ProblemDefinition& p, const Vector& x0,
                                 const StoppingCriteria& criteria, const std::string& condition,
                                 const std::string& method, const LineSearchParams& params) {
    DriverSettings settings = default_settings("damped-newton");
    settings.criteria = criteria;
    settings.condition = condition;
    settings.generator = method;
    settings.line_search = params;
    return run_driver("damped-newton", p, x0, settings);
}

SolveResult trust_region_driver(const ProblemDefinition& p, const Vector& x0,
                                const StoppingCriteria& criteria, const std::string& subproblem,
                                const TrustRegionState& region) {
    DriverSettings settings = default_settings("trust-region-newton");
    settings.criteria = criteria;
    settings.subproblem = subproblem;
    settings.trust_region = region;
    return run_driver("trust-region-newton", p, x0, settings);
}

SolveResult quasi_newton_driver(const ProblemDefinition& p, const Vector& x0,
                                const StoppingCriteria& criteria, const std::string& condition,
                                const std::string& method, const LineSearchParams& params) {
    DriverSettings settings = default_settings("bfgs");
    settings.criteria = criteria;
    settings.condition = condition;
    settings.generator = method;
    settings.line_search = params;
    return run_driver("bfgs", p, x0, settings);
}

SolveResult inexact_newton_driver(const ProblemDefinition& p, const Vector& x0,
                                  const StoppingCriteria& criteria, double forcing,
                                  const LineSearchParams& params) {
    DriverSettings settings = default_settings("inexact-newton");
    settings.criteria = criteria;
    settings.forcing = forcing;
    settings.line_search = params;
    return run_driver("inexact-newton", p, x0, settings);
}

SolveResult gauss_newton_driver(const ProblemDefinition& p, const Vector& x0,
                                const StoppingCriteria& criteria, const std::string& condition,
                                const std::string& method, const LineSearchParams& params) {
    DriverSettings settings = default_settings("gauss-newton");
    settings.criteria = criteria;
    settings.condition = condition;
    settings.generator = method;
    settings.line_search = params;
    return run_driver("gauss-newton", p, x0, settings);
}

}  // namespace newton
