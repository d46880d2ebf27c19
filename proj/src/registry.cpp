#include "newton/registry.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "newton/errors.hpp"

namespace newton {

namespace {

constexpr std::array<std::pair<Category, std::string_view>, 6> kCategoryNames{{
    {Category::Problems, "problems"},
    {Category::LinearSolvers, "linear-solvers"},
    {Category::Conditions, "conditions"},
    {Category::Generators, "generators"},
    {Category::Subproblems, "subproblems"},
    {Category::Drivers, "drivers"},
}};

template <typename Map>
std::vector<std::string> keys_of(const Map& map) {
    std::vector<std::string> out;
    out.reserve(map.size());
    for (const auto& [name, builder] : map) out.push_back(name);
    return out;  // std::map iterates in sorted order
}

template <typename Map>
const typename Map::mapped_type& find_or_throw(const Map& map, const std::string& name,
                                               Category category) {
    const auto it = map.find(name);
    if (it == map.end()) {
        switch (category) {
            case Category::LinearSolvers: throw UnknownSolver(name);
            case Category::Conditions:
            case Category::Generators:
            case Category::Subproblems:
                throw UnknownStrategy(name, std::string(to_string(category)));
            default: throw UnknownComponent(name, std::string(to_string(category)));
        }
    }
    return it->second;
}

StepLengthHook line_search_hook(const ComponentRegistry& registry, const DriverSettings& settings) {
    return hooks::line_search_step(registry.condition(settings.condition, settings.line_search),
                                   registry.generator(settings.generator, settings.line_search),
                                   settings.line_search);
}

}  // namespace

std::string_view to_string(Category category) {
    for (const auto& [c, name] : kCategoryNames) {
        if (c == category) return name;
    }
    return "?";
}

std::optional<Category> parse_category(std::string_view text) {
    for (const auto& [c, name] : kCategoryNames) {
        if (name == text) return c;
    }
    return std::nullopt;
}

const std::vector<Category>& all_categories() {
    static const std::vector<Category> all = [] {
        std::vector<Category> out;
        for (const auto& entry : kCategoryNames) out.push_back(entry.first);
        return out;
    }();
    return all;
}

ComponentRegistry& ComponentRegistry::instance() {
    static ComponentRegistry shared;
    static const bool initialized = [] {
        register_builtins(shared);
        shared.freeze();
        return true;
    }();
    (void)initialized;
    return shared;
}

ComponentRegistry& registry_init() { return ComponentRegistry::instance(); }

void ComponentRegistry::check_open(Category category, const std::string& name) const {
    if (frozen_) {
        throw RegistryFrozen("registry is frozen; cannot register " + std::string(to_string(category)) +
                             " component '" + name + "'");
    }
    if (name.empty()) throw std::invalid_argument("component names must be non-empty");
    if (contains(category, name)) {
        throw std::invalid_argument(std::string(to_string(category)) + " component '" + name +
                                    "' is already registered");
    }
}

void ComponentRegistry::add_problem(const std::string& name, ProblemBuilder builder) {
    check_open(Category::Problems, name);
    problems_.emplace(name, std::move(builder));
}

void ComponentRegistry::add_linear_solver(const std::string& name, LinearSolverBuilder builder) {
    check_open(Category::LinearSolvers, name);
    linear_solvers_.emplace(name, std::move(builder));
}

void ComponentRegistry::add_condition(const std::string& name, ConditionBuilder builder) {
    check_open(Category::Conditions, name);
    conditions_.emplace(name, std::move(builder));
}

void ComponentRegistry::add_generator(const std::string& name, GeneratorBuilder builder) {
    check_open(Category::Generators, name);
    generators_.emplace(name, std::move(builder));
}

void ComponentRegistry::add_subproblem(const std::string& name, SubproblemBuilder builder) {
    check_open(Category::Subproblems, name);
    subproblems_.emplace(name, std::move(builder));
}

void ComponentRegistry::add_driver(const std::string& name, DriverBuilder builder) {
    check_open(Category::Drivers, name);
    drivers_.emplace(name, std::move(builder));
}

std::size_t ComponentRegistry::registration_count() const noexcept {
    return problems_.size() + linear_solvers_.size() + conditions_.size() + generators_.size() +
           subproblems_.size() + drivers_.size();
}

std::vector<std::string> ComponentRegistry::names(Category category) const {
    switch (category) {
        case Category::Problems: return keys_of(problems_);
        case Category::LinearSolvers: return keys_of(linear_solvers_);
        case Category::Conditions: return keys_of(conditions_);
        case Category::Generators: return keys_of(generators_);
        case Category::Subproblems: return keys_of(subproblems_);
        case Category::Drivers: return keys_of(drivers_);
    }
    return {};
}

bool ComponentRegistry::contains(Category category, const std::string& name) const {
    const auto list = names(category);
    return std::binary_search(list.begin(), list.end(), name);
}

CorpusEntry ComponentRegistry::problem(const std::string& name) const {
    return find_or_throw(problems_, name, Category::Problems)();
}

std::shared_ptr<const LinearSolver> ComponentRegistry::linear_solver(
    const std::string& name, const SolverConfigMap& config) const {
    return find_or_throw(linear_solvers_, name, Category::LinearSolvers)(config);
}

std::shared_ptr<const AcceptanceCondition> ComponentRegistry::condition(
    const std::string& name, const LineSearchParams& params) const {
    return find_or_throw(conditions_, name, Category::Conditions)(params);
}

std::shared_ptr<const StepGenerator> ComponentRegistry::generator(
    const std::string& name, const LineSearchParams& params) const {
    return find_or_throw(generators_, name, Category::Generators)(params);
}

std::shared_ptr<const SubproblemSolver> ComponentRegistry::subproblem(const std::string& name) const {
    return find_or_throw(subproblems_, name, Category::Subproblems)();
}

NewtonHooks ComponentRegistry::driver(const std::string& name, const DriverSettings& settings) const {
    return find_or_throw(drivers_, name, Category::Drivers)(settings);
}

void register_builtins(ComponentRegistry& registry) {
    for (const CorpusEntry& entry : problem_corpus()) {
        registry.add_problem(entry.problem.name, [entry] { return entry; });
    }

    auto no_config = [](const std::string& solver, const SolverConfigMap& config) {
        if (!config.empty()) {
            throw InvalidOverride(config.begin()->first, "solver '" + solver + "' takes no settings");
        }
    };
    registry.add_linear_solver("lu", [no_config](const SolverConfigMap& config) {
        no_config("lu", config);
        return std::make_shared<const LuSolver>();
    });
    registry.add_linear_solver("cholesky", [no_config](const SolverConfigMap& config) {
        no_config("cholesky", config);
        return std::make_shared<const CholeskySolver>(false);
    });
    registry.add_linear_solver("modified-cholesky", [no_config](const SolverConfigMap& config) {
        no_config("modified-cholesky", config);
        return std::make_shared<const CholeskySolver>(true);
    });
    registry.add_linear_solver("cg", [](const SolverConfigMap& config) {
        double tol = 1e-10;
        double max_iter = 0.0;
        for (const auto& [key, value] : config) {
            if (key == "tol") {
                if (!(value > 0.0)) throw InvalidOverride(key, "cg tolerance must be positive");
                tol = value;
            } else if (key == "max_iter") {
                if (!(value >= 0.0) || value != static_cast<double>(static_cast<std::size_t>(value))) {
                    throw InvalidOverride(key, "cg max_iter must be a non-negative integer");
                }
                max_iter = value;
            } else {
                throw InvalidOverride(key, "cg accepts tol and max_iter");
            }
        }
        return std::make_shared<const CgSolver>(tol, static_cast<std::size_t>(max_iter));
    });

    for (const char* name : {"armijo", "wolfe", "strong-wolfe", "goldstein"}) {
        registry.add_condition(name, [name = std::string(name)](const LineSearchParams& params) {
            return make_condition(name, params);
        });
    }
    for (const char* name : {"bisection", "backtracking-quadratic", "backtracking-cubic"}) {
        registry.add_generator(name, [name = std::string(name)](const LineSearchParams& params) {
            return make_generator(name, params);
        });
    }
    for (const char* name : {"cauchy", "dogleg", "subspace-2d"}) {
        registry.add_subproblem(name, [name = std::string(name)] { return make_subproblem(name); });
    }

    const ComponentRegistry* reg = &registry;
    registry.add_driver("damped-newton", [reg](const DriverSettings& settings) {
        auto stats = std::make_shared<DriverStats>();
        return NewtonHooks{hooks::newton_direction(reg->linear_solver(settings.linear_solver), stats),
                           line_search_hook(*reg, settings), hooks::standard_stop(), stats};
    });
    registry.add_driver("trust-region-newton", [reg](const DriverSettings& settings) {
        if (auto v = settings.trust_region.violation()) throw InvalidOverride(v->first, v->second);
        auto stats = std::make_shared<DriverStats>();
        auto context = std::make_shared<TrustRegionContext>();
        context->region = settings.trust_region;
        return NewtonHooks{
            hooks::trust_region_direction(context, reg->subproblem(settings.subproblem), stats),
            hooks::trust_region_step(context, stats), hooks::standard_stop(), stats};
    });
    registry.add_driver("bfgs", [reg](const DriverSettings& settings) {
        auto stats = std::make_shared<DriverStats>();
        return NewtonHooks{hooks::bfgs_direction(stats), line_search_hook(*reg, settings),
                           hooks::standard_stop(), stats};
    });
    registry.add_driver("inexact-newton", [reg](const DriverSettings& settings) {
        if (!(settings.forcing > 0.0) || !(settings.forcing < 1.0)) {
            throw InvalidOverride("eta", "forcing term must lie in (0, 1)");
        }
        auto stats = std::make_shared<DriverStats>();
        return NewtonHooks{hooks::truncated_cg_direction(settings.forcing, stats),
                           line_search_hook(*reg, settings), hooks::standard_stop(), stats};
    });
    registry.add_driver("gauss-newton", [reg](const DriverSettings& settings) {
        auto stats = std::make_shared<DriverStats>();
        return NewtonHooks{hooks::gauss_newton_direction(stats), line_search_hook(*reg, settings),
                           hooks::standard_stop(), stats};
    });
}

std::shared_ptr<const LinearSolver> external_solver_adapter(const std::string& name,
                                                            const SolverConfigMap& config) {
    return ComponentRegistry::instance().linear_solver(name, config);
}

}  // namespace newton
