#pragma once

// Flat `key = value` solver configuration and registry-driven assembly.
//
//   # comment
//   driver = bfgs
//   problem = rosenbrock
//   x0 = -1.2, 1.0
//   c1 = 1e-4
//
// `driver` is required. Without `problem` the solver runs on rosenbrock; without
// `x0` it starts from the problem's standard start.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "newton/corpus.hpp"
#include "newton/drivers.hpp"

namespace newton {

struct SolverConfig {
    std::string driver;
    std::string problem;
    std::optional<Vector> x0;
    std::map<std::string, std::string> overrides;  // values kept as written

    friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

// Accepted override keys, sorted. String-valued: condition, generator,
// subproblem, linear_solver. Everything else is numeric.
const std::vector<std::string>& override_keys();
bool is_string_override(std::string_view key);

// Throws ParseError(line, reason). Duplicate keys keep the last value and add a
// message to `warnings` when given.
SolverConfig parse_config(std::string_view text, std::vector<std::string>* warnings = nullptr);

// Inverse of parse_config: parse_config(render_config(c)) == c.
std::string render_config(const SolverConfig& config);

// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

// Parses one finite decimal literal; nullopt on anything else.
std::optional<double> parse_double(std::string_view text);

// Comma-separated finite literals; nullopt if any element is bad.
std::optional<Vector> parse_vector(std::string_view text);

inline constexpr const char* kDefaultProblem = "rosenbrock";

class Solver {
public:
    Solver(std::string driver, CorpusEntry entry, Vector x0, DriverSettings settings);

    const std::string& driver() const noexcept { return driver_; }
    const CorpusEntry& entry() const noexcept { return entry_; }
    const ProblemDefinition& problem() const noexcept { return entry_.problem; }
    const Vector& x0() const noexcept { return x0_; }
    const DriverSettings& settings() const noexcept { return settings_; }

    SolveResult run() const;

private:
    std::string driver_;
    CorpusEntry entry_;
    Vector x0_;
    DriverSettings settings_;
};

// Resolves every name through the shared registry and applies overrides on top
// of default_settings(driver). Throws UnknownComponent(name, category),
// InvalidOverride(key) or DimensionMismatch (x0 length).
Solver build_solver(const SolverConfig& config);

}  // namespace newton
