#include "newton/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "newton/errors.hpp"
#include "newton/registry.hpp"

namespace newton {

namespace {

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r");
    return text.substr(first, last - first + 1);
}

const std::vector<std::string>& string_keys() {
    static const std::vector<std::string> keys{"condition", "generator", "linear_solver",
                                               "subproblem"};
    return keys;
}

std::size_t to_count(const std::string& key, double value) {
    if (!(value >= 1.0) || value != std::floor(value) || value > 1e9) {
        throw InvalidOverride(key, "must be a positive integer");
    }
    return static_cast<std::size_t>(value);
}

void apply_override(DriverSettings& s, const std::string& key, const std::string& text,
                    bool& delta_max_set) {
    if (key == "condition") {
        s.condition = text;
        return;
    }
    if (key == "generator") {
        s.generator = text;
        return;
    }
    if (key == "subproblem") {
        s.subproblem = text;
        return;
    }
    if (key == "linear_solver") {
        s.linear_solver = text;
        return;
    }
    const auto parsed = parse_double(text);
    if (!parsed) throw InvalidOverride(key, "'" + text + "' is not a finite number");
    const double v = *parsed;
    if (key == "grad_tol") s.criteria.grad_tol = v;
    else if (key == "step_tol") s.criteria.step_tol = v;
    else if (key == "f_tol") s.criteria.f_tol = v;
    else if (key == "max_iter") s.criteria.max_iter = to_count(key, v);
    else if (key == "c1") s.line_search.c1 = v;
    else if (key == "c2") s.line_search.c2 = v;
    else if (key == "goldstein_c") s.line_search.goldstein_c = v;
    else if (key == "lambda0") s.line_search.lambda0 = v;
    else if (key == "lambda_min") s.line_search.lambda_min = v;
    else if (key == "max_trials") s.line_search.max_trials = to_count(key, v);
    else if (key == "delta0") {
        s.trust_region.radius = v;
        if (!delta_max_set) s.trust_region.max_radius = 1e3 * v;
    } else if (key == "delta_max") {
        s.trust_region.max_radius = v;
        delta_max_set = true;
    } else if (key == "eta") s.forcing = v;
    else if (key == "eta_accept") s.trust_region.eta_accept = v;
    else if (key == "eta1") s.trust_region.eta_shrink = v;
    else if (key == "eta2") s.trust_region.eta_expand = v;
    else throw InvalidOverride(key, "unknown setting");
}

}  // namespace

const std::vector<std::string>& override_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k{"grad_tol", "step_tol", "f_tol",      "max_iter",  "c1",
                                   "c2",       "goldstein_c", "lambda0", "lambda_min", "max_trials",
                                   "condition", "generator", "subproblem", "linear_solver",
                                   "delta0",   "delta_max", "eta",       "eta_accept", "eta1",
                                   "eta2"};
        std::sort(k.begin(), k.end());
        return k;
    }();
    return keys;
}

bool is_string_override(std::string_view key) {
    const auto& keys = string_keys();
    return std::find(keys.begin(), keys.end(), key) != keys.end();
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    // from_chars rejects a leading '+'; accept it for hand-written files.
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<Vector> parse_vector(std::string_view text) {
    Vector out;
    while (true) {
        const auto comma = text.find(',');
        const auto value = parse_double(text.substr(0, comma));
        if (!value) return std::nullopt;
        out.push_back(*value);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

std::string format_double(double value) {
    char buffer[64];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, end);
}

SolverConfig parse_config(std::string_view text, std::vector<std::string>* warnings) {
    SolverConfig config;
    std::map<std::string, std::size_t> seen;
    std::size_t line_no = 0;
    while (!text.empty() || line_no == 0) {
        ++line_no;
        const auto newline = text.find('\n');
        std::string_view line = text.substr(0, newline);
        text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            if (text.empty()) break;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "missing key");
        if (value.empty()) throw ParseError(line_no, "missing value for '" + key + "'");

        if (key == "driver") {
            config.driver = std::string(value);
        } else if (key == "problem") {
            config.problem = std::string(value);
        } else if (key == "x0") {
            auto x0 = parse_vector(value);
            if (!x0) throw ParseError(line_no, "x0 must be comma-separated finite numbers");
            config.x0 = std::move(*x0);
        } else {
            const auto& keys = override_keys();
            if (!std::binary_search(keys.begin(), keys.end(), key)) {
                throw ParseError(line_no, "unknown key '" + key + "'");
            }
            if (!is_string_override(key) && !parse_double(value)) {
                throw ParseError(line_no, "'" + key + "' needs a finite number");
            }
            config.overrides[key] = std::string(value);
        }

        if (const auto it = seen.find(key); it != seen.end() && warnings) {
            warnings->push_back("line " + std::to_string(line_no) + ": duplicate key '" + key +
                                "' overrides line " + std::to_string(it->second));
        }
        seen[key] = line_no;
    }
    if (config.driver.empty()) throw ParseError(line_no, "missing required key 'driver'");
    return config;
}

std::string render_config(const SolverConfig& config) {
    std::ostringstream out;
    out << "driver = " << config.driver << '\n';
    if (!config.problem.empty()) out << "problem = " << config.problem << '\n';
    if (config.x0) {
        out << "x0 = ";
        for (std::size_t i = 0; i < config.x0->size(); ++i) {
            if (i) out << ", ";
            out << format_double((*config.x0)[i]);
        }
        out << '\n';
    }
    for (const auto& [key, value] : config.overrides) out << key << " = " << value << '\n';
    return out.str();
}

Solver::Solver(std::string driver, CorpusEntry entry, Vector x0, DriverSettings settings)
    : driver_(std::move(driver)),
      entry_(std::move(entry)),
      x0_(std::move(x0)),
      settings_(std::move(settings)) {}

SolveResult Solver::run() const { return run_driver(driver_, entry_.problem, x0_, settings_); }

Solver build_solver(const SolverConfig& config) {
    const ComponentRegistry& registry = ComponentRegistry::instance();
    if (!registry.contains(Category::Drivers, config.driver)) {
        throw UnknownComponent(config.driver, "drivers");
    }
    CorpusEntry entry = registry.problem(config.problem.empty() ? kDefaultProblem : config.problem);

    DriverSettings settings = default_settings(config.driver);
    bool delta_max_set = false;
    // delta_max sorts before delta0, so apply it last to let it win.
    for (const auto& [key, value] : config.overrides) {
        if (key != "delta_max") apply_override(settings, key, value, delta_max_set);
    }
    if (const auto it = config.overrides.find("delta_max"); it != config.overrides.end()) {
        apply_override(settings, it->first, it->second, delta_max_set);
    }

    if (auto v = settings.criteria.violation()) throw InvalidOverride(v->first, v->second);
    if (auto v = settings.line_search.violation()) throw InvalidOverride(v->first, v->second);
    if (auto v = settings.trust_region.violation()) throw InvalidOverride(v->first, v->second);
    if (!(settings.forcing > 0.0) || !(settings.forcing < 1.0)) {
        throw InvalidOverride("eta", "forcing term must lie in (0, 1)");
    }

    // Resolve strategy names now so a bad name fails at build time.
    registry.condition(settings.condition, settings.line_search);
    registry.generator(settings.generator, settings.line_search);
    registry.subproblem(settings.subproblem);
    registry.linear_solver(settings.linear_solver);

    Vector x0 = config.x0 ? *config.x0 : entry.standard_start;
    if (x0.size() != entry.problem.n) {
        throw DimensionMismatch("x0 has length " + std::to_string(x0.size()) + ", problem '" +
                                entry.problem.name + "' has n=" + std::to_string(entry.problem.n));
    }
    return Solver(config.driver, std::move(entry), std::move(x0), std::move(settings));
}

}  // namespace newton
