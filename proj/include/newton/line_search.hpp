#pragma once

// Step-length selection along a fixed descent direction. The acceptance test
// and the trial-step generator are independent strategies: any condition
// composes with any generator.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace newton {

// phi(lambda) = f(x + lambda s) with f0 = phi(0) and slope0 = phi'(0) < 0.
struct LineFunction {
    std::function<double(double)> phi;
    std::function<double(double)> dphi;  // optional; central differences otherwise
    double f0 = 0.0;
    double slope0 = 0.0;

    double slope_at(double lambda) const;
};

struct LineSearchParams {
    double c1 = 1e-4;           // sufficient decrease
    double c2 = 0.9;            // curvature
    double goldstein_c = 0.25;  // Goldstein band, in (0, 1/2)
    double lambda0 = 1.0;
    double lambda_min = 1e-12;
    double lambda_max = 1e10;
    std::size_t max_trials = 40;
    double safeguard_low = 0.1;   // interpolated steps stay in
    double safeguard_high = 0.5;  // [low, high] * previous trial
    double expansion = 2.0;       // growth when a trial is too short and nothing brackets it

    // First violated constraint as (parameter name, reason).
    std::optional<std::pair<std::string, std::string>> violation() const;
    void validate() const;  // throws std::invalid_argument
};

bool armijo_holds(double f0, double slope0, double lambda, double f_trial, double c1);
bool curvature_holds(double slope0, double slope_trial, double c2, bool strong);
bool goldstein_holds(double f0, double slope0, double lambda, double f_trial, double c);

struct Trial {
    double lambda = 0.0;
    double f = 0.0;
    std::optional<double> slope;
};

enum class Verdict { Accept, TooLong, TooShort };

class AcceptanceCondition {
public:
    virtual ~AcceptanceCondition() = default;
    virtual std::string name() const = 0;
    // Classifies a trial; fills trial.slope when the test needs phi'.
    virtual Verdict judge(const LineFunction& lf, Trial& trial) const = 0;
    // Pure predicate on a fully evaluated trial (slope required where used).
    virtual bool holds(const LineFunction& lf, const Trial& trial) const = 0;
};

class ArmijoCondition final : public AcceptanceCondition {
public:
    explicit ArmijoCondition(double c1) : c1_(c1) {}
    std::string name() const override { return "armijo"; }
    Verdict judge(const LineFunction& lf, Trial& trial) const override;
    bool holds(const LineFunction& lf, const Trial& trial) const override;

private:
    double c1_;
};

// Sufficient decrease plus the weak ("wolfe") or strong ("strong-wolfe")
// curvature test.
class WolfeCondition final : public AcceptanceCondition {
public:
    WolfeCondition(double c1, double c2, bool strong) : c1_(c1), c2_(c2), strong_(strong) {}
    std::string name() const override { return strong_ ? "strong-wolfe" : "wolfe"; }
    Verdict judge(const LineFunction& lf, Trial& trial) const override;
    bool holds(const LineFunction& lf, const Trial& trial) const override;

private:
    double c1_;
    double c2_;
    bool strong_;
};

class GoldsteinCondition final : public AcceptanceCondition {
public:
    explicit GoldsteinCondition(double c) : c_(c) {}
    std::string name() const override { return "goldstein"; }
    Verdict judge(const LineFunction& lf, Trial& trial) const override;
    bool holds(const LineFunction& lf, const Trial& trial) const override;

private:
    double c_;
};

struct Safeguard {
    double low = 0.1;
    double high = 0.5;
};

// Minimizer of the quadratic through (0, f0) with slope slope0 and
// (lambda_prev, f_prev), clamped into [low, high] * lambda_prev.
// Throws DegenerateInterpolant when the curvature term is <= 1e-16.
double quadratic_step(double f0, double slope0, double lambda_prev, double f_prev,
                      Safeguard guard = {});

// Minimizer of the cubic through (0, f0) with slope slope0 and the two trial
// points, clamped into [low, high] * lambda1 (lambda1 is the latest trial).
// Falls back to quadratic_step on (lambda1, f1) when the cubic has no
// interior minimizer or its leading coefficient is below 1e-16.
double cubic_step(double f0, double slope0, double lambda1, double f1, double lambda2, double f2,
                  Safeguard guard = {});

// What a generator sees when a trial was too long: the bracket
// [lo, lo + width] in coordinates relative to lo.
struct Bracket {
    double f_lo = 0.0;
    double slope_lo = 0.0;
    double width = 0.0;
    double f_hi = 0.0;
    std::optional<std::pair<double, double>> previous;  // earlier (offset, f)
};

class StepGenerator {
public:
    virtual ~StepGenerator() = default;
    virtual std::string name() const = 0;
    // Offset in (0, width) of the next trial.
    virtual double propose(const Bracket& bracket) const = 0;
};

class BisectionGenerator final : public StepGenerator {
public:
    std::string name() const override { return "bisection"; }
    double propose(const Bracket& bracket) const override { return 0.5 * bracket.width; }
};

class QuadraticBacktracking final : public StepGenerator {
public:
    explicit QuadraticBacktracking(Safeguard guard = {}) : guard_(guard) {}
    std::string name() const override { return "backtracking-quadratic"; }
    double propose(const Bracket& bracket) const override;

private:
    Safeguard guard_;
};

class CubicBacktracking final : public StepGenerator {
public:
    explicit CubicBacktracking(Safeguard guard = {}) : guard_(guard) {}
    std::string name() const override { return "backtracking-cubic"; }
    double propose(const Bracket& bracket) const override;

private:
    Safeguard guard_;
};

struct LineSearchResult {
    double lambda = 0.0;
    double f = 0.0;
    std::optional<double> slope;
    std::size_t trials = 0;
    std::vector<double> tried;  // every trial lambda, in order
};

// Generator proposes, condition disposes. Throws NotDescentDirection when
// slope0 >= 0 and LineSearchFailed when the trial budget runs out or the step
// leaves [lambda_min, lambda_max].
LineSearchResult line_search(const LineFunction& lf, const AcceptanceCondition& condition,
                             const StepGenerator& generator, const LineSearchParams& params);

// Resolves both strategies by registered name.
LineSearchResult line_search(const LineFunction& lf, const std::string& condition_name,
                             const std::string& method_name, const LineSearchParams& params);

LineSearchResult bisection_search(const LineFunction& lf, const AcceptanceCondition& condition,
                                  const LineSearchParams& params);

// Builders used by the registry. Throw UnknownStrategy.
std::shared_ptr<const AcceptanceCondition> make_condition(const std::string& name,
                                                          const LineSearchParams& params);
std::shared_ptr<const StepGenerator> make_generator(const std::string& name,
                                                    const LineSearchParams& params);

}  // namespace newton
