#include "newton/line_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "newton/errors.hpp"
#include "newton/registry.hpp"

namespace newton {

namespace {

constexpr double kDegenerate = 1e-16;

double clamp_into(double raw, double reference, const Safeguard& guard) {
    return std::clamp(raw, guard.low * reference, guard.high * reference);
}

}  // namespace

double LineFunction::slope_at(double lambda) const {
    if (dphi) return dphi(lambda);
    const double h = 1e-6 * std::max(1.0, std::abs(lambda));
    return (phi(lambda + h) - phi(lambda - h)) / (2.0 * h);
}

std::optional<std::pair<std::string, std::string>> LineSearchParams::violation() const {
    auto bad = [](const char* key, const char* why) {
        return std::optional<std::pair<std::string, std::string>>(std::in_place, key, why);
    };
    if (!std::isfinite(c1) || !(c1 > 0.0) || !(c1 < 1.0)) return bad("c1", "need 0 < c1 < 1");
    if (!std::isfinite(c2) || !(c2 > c1) || !(c2 < 1.0)) return bad("c2", "need c1 < c2 < 1");
    if (!(goldstein_c > 0.0) || !(goldstein_c < 0.5)) {
        return bad("goldstein_c", "need 0 < goldstein_c < 0.5");
    }
    if (!(lambda_min > 0.0)) return bad("lambda_min", "need lambda_min > 0");
    if (!std::isfinite(lambda0) || !(lambda0 > lambda_min)) {
        return bad("lambda0", "need lambda0 > lambda_min");
    }
    if (!(lambda_max >= lambda0)) return bad("lambda_max", "need lambda_max >= lambda0");
    if (max_trials < 1) return bad("max_trials", "need at least one trial");
    if (!(safeguard_low > 0.0) || !(safeguard_high > safeguard_low) || !(safeguard_high < 1.0)) {
        return bad("safeguard", "need 0 < low < high < 1");
    }
    if (!(expansion > 1.0)) return bad("expansion", "need expansion > 1");
    return std::nullopt;
}

void LineSearchParams::validate() const {
    if (auto v = violation()) throw std::invalid_argument(v->first + ": " + v->second);
}

bool armijo_holds(double f0, double slope0, double lambda, double f_trial, double c1) {
    return f_trial <= f0 + c1 * lambda * slope0;
}

bool curvature_holds(double slope0, double slope_trial, double c2, bool strong) {
    if (strong) return std::abs(slope_trial) <= c2 * std::abs(slope0);
    return slope_trial >= c2 * slope0;
}

bool goldstein_holds(double f0, double slope0, double lambda, double f_trial, double c) {
    return f0 + (1.0 - c) * lambda * slope0 <= f_trial && f_trial <= f0 + c * lambda * slope0;
}

Verdict ArmijoCondition::judge(const LineFunction& lf, Trial& trial) const {
    return holds(lf, trial) ? Verdict::Accept : Verdict::TooLong;
}

bool ArmijoCondition::holds(const LineFunction& lf, const Trial& trial) const {
    return armijo_holds(lf.f0, lf.slope0, trial.lambda, trial.f, c1_);
}

Verdict WolfeCondition::judge(const LineFunction& lf, Trial& trial) const {
    if (!armijo_holds(lf.f0, lf.slope0, trial.lambda, trial.f, c1_)) return Verdict::TooLong;
    if (!trial.slope) trial.slope = lf.slope_at(trial.lambda);
    const double slope = *trial.slope;
    if (curvature_holds(lf.slope0, slope, c2_, strong_)) return Verdict::Accept;
    // Positive slope past the tolerance means the minimizer was overshot.
    return (strong_ && slope > 0.0) ? Verdict::TooLong : Verdict::TooShort;
}

bool WolfeCondition::holds(const LineFunction& lf, const Trial& trial) const {
    if (!trial.slope) throw std::invalid_argument("wolfe test needs the trial slope");
    return armijo_holds(lf.f0, lf.slope0, trial.lambda, trial.f, c1_) &&
           curvature_holds(lf.slope0, *trial.slope, c2_, strong_);
}

Verdict GoldsteinCondition::judge(const LineFunction& lf, Trial& trial) const {
    if (trial.f > lf.f0 + c_ * trial.lambda * lf.slope0) return Verdict::TooLong;
    if (trial.f < lf.f0 + (1.0 - c_) * trial.lambda * lf.slope0) return Verdict::TooShort;
    return Verdict::Accept;
}

bool GoldsteinCondition::holds(const LineFunction& lf, const Trial& trial) const {
    return goldstein_holds(lf.f0, lf.slope0, trial.lambda, trial.f, c_);
}

double quadratic_step(double f0, double slope0, double lambda_prev, double f_prev, Safeguard guard) {
    const double denominator = 2.0 * (f_prev - f0 - slope0 * lambda_prev);
    if (!(denominator > kDegenerate)) {
        throw DegenerateInterpolant("quadratic interpolant has no positive curvature");
    }
    const double raw = -slope0 * lambda_prev * lambda_prev / denominator;
    return clamp_into(raw, lambda_prev, guard);
}

double cubic_step(double f0, double slope0, double lambda1, double f1, double lambda2, double f2,
                  Safeguard guard) {
    if (lambda1 == lambda2 || !(lambda1 > 0.0) || !(lambda2 > 0.0)) {
        throw DegenerateInterpolant("cubic interpolation needs two distinct positive trials");
    }
    const double r1 = f1 - f0 - slope0 * lambda1;
    const double r2 = f2 - f0 - slope0 * lambda2;
    const double l1sq = lambda1 * lambda1;
    const double l2sq = lambda2 * lambda2;
    const double span = lambda1 - lambda2;
    // phi ~ f0 + slope0 t + b t^2 + a t^3
    const double a = (r1 / l1sq - r2 / l2sq) / span;
    const double b = (-lambda2 * r1 / l1sq + lambda1 * r2 / l2sq) / span;

    if (std::abs(a) < kDegenerate) return quadratic_step(f0, slope0, lambda1, f1, guard);
    const double discriminant = b * b - 3.0 * a * slope0;
    if (discriminant < 0.0) return quadratic_step(f0, slope0, lambda1, f1, guard);

    const double root = std::sqrt(discriminant);
    // Two algebraically equal forms; pick the one without cancellation.
    const double raw = b > 0.0 ? -slope0 / (b + root) : (-b + root) / (3.0 * a);
    if (!std::isfinite(raw) || !(raw > 0.0)) return quadratic_step(f0, slope0, lambda1, f1, guard);
    return clamp_into(raw, lambda1, guard);
}

double QuadraticBacktracking::propose(const Bracket& bracket) const {
    if (!(bracket.slope_lo < 0.0)) return 0.5 * bracket.width;
    try {
        return quadratic_step(bracket.f_lo, bracket.slope_lo, bracket.width, bracket.f_hi, guard_);
    } catch (const DegenerateInterpolant&) {
        return 0.5 * bracket.width;
    }
}

double CubicBacktracking::propose(const Bracket& bracket) const {
    if (!(bracket.slope_lo < 0.0)) return 0.5 * bracket.width;
    try {
        if (bracket.previous && std::isfinite(bracket.f_hi) &&
            std::isfinite(bracket.previous->second)) {
            return cubic_step(bracket.f_lo, bracket.slope_lo, bracket.width, bracket.f_hi,
                              bracket.previous->first, bracket.previous->second, guard_);
        }
        return quadratic_step(bracket.f_lo, bracket.slope_lo, bracket.width, bracket.f_hi, guard_);
    } catch (const DegenerateInterpolant&) {
        return 0.5 * bracket.width;
    }
}

LineSearchResult line_search(const LineFunction& lf, const AcceptanceCondition& condition,
                             const StepGenerator& generator, const LineSearchParams& params) {
    params.validate();
    if (!(lf.slope0 < 0.0)) {
        throw NotDescentDirection("line search needs phi'(0) < 0, got " + std::to_string(lf.slope0));
    }

    LineSearchResult result;
    double lo = 0.0;
    double f_lo = lf.f0;
    double slope_lo = lf.slope0;
    std::optional<double> hi;
    double f_hi = 0.0;
    std::optional<std::pair<double, double>> previous;
    double lambda = params.lambda0;

    while (true) {
        if (result.trials >= params.max_trials) {
            throw LineSearchFailed("line search: " + std::to_string(params.max_trials) +
                                   " trials exhausted (" + condition.name() + ", " +
                                   generator.name() + ")");
        }
        if (lambda < params.lambda_min) {
            throw LineSearchFailed("line search: step fell below lambda_min");
        }
        if (lambda > params.lambda_max) {
            throw LineSearchFailed("line search: step exceeded lambda_max");
        }

        Trial trial{lambda, lf.phi(lambda), std::nullopt};
        ++result.trials;
        result.tried.push_back(lambda);
        const Verdict verdict =
            std::isfinite(trial.f) ? condition.judge(lf, trial) : Verdict::TooLong;

        if (verdict == Verdict::Accept) {
            result.lambda = lambda;
            result.f = trial.f;
            result.slope = trial.slope;
            return result;
        }
        if (verdict == Verdict::TooLong) {
            if (hi) previous.emplace(*hi - lo, f_hi);
            hi = lambda;
            f_hi = std::isfinite(trial.f) ? trial.f : std::numeric_limits<double>::infinity();
        } else {
            lo = lambda;
            f_lo = trial.f;
            slope_lo = trial.slope ? *trial.slope : lf.slope_at(lambda);
            previous.reset();
            if (!hi) {
                lambda *= params.expansion;
                continue;
            }
        }
        const Bracket bracket{f_lo, slope_lo, *hi - lo, f_hi, previous};
        lambda = lo + generator.propose(bracket);
    }
}

LineSearchResult line_search(const LineFunction& lf, const std::string& condition_name,
                             const std::string& method_name, const LineSearchParams& params) {
    const auto& registry = ComponentRegistry::instance();
    const auto condition = registry.condition(condition_name, params);
    const auto generator = registry.generator(method_name, params);
    return line_search(lf, *condition, *generator, params);
}

LineSearchResult bisection_search(const LineFunction& lf, const AcceptanceCondition& condition,
                                  const LineSearchParams& params) {
    return line_search(lf, condition, BisectionGenerator{}, params);
}

std::shared_ptr<const AcceptanceCondition> make_condition(const std::string& name,
                                                          const LineSearchParams& params) {
    if (name == "armijo") return std::make_shared<ArmijoCondition>(params.c1);
    if (name == "wolfe") return std::make_shared<WolfeCondition>(params.c1, params.c2, false);
    if (name == "strong-wolfe") return std::make_shared<WolfeCondition>(params.c1, params.c2, true);
    if (name == "goldstein") return std::make_shared<GoldsteinCondition>(params.goldstein_c);
    throw UnknownStrategy(name, "conditions");
}

std::shared_ptr<const StepGenerator> make_generator(const std::string& name,
                                                    const LineSearchParams& params) {
    const Safeguard guard{params.safeguard_low, params.safeguard_high};
    if (name == "bisection") return std::make_shared<BisectionGenerator>();
    if (name == "backtracking-quadratic") return std::make_shared<QuadraticBacktracking>(guard);
    if (name == "backtracking-cubic") return std::make_shared<CubicBacktracking>(guard);
    throw UnknownStrategy(name, "generators");
}

}  // namespace newton
