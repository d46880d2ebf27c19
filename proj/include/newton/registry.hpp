#pragma once

// Name -> builder tables for every pluggable component family, plus the
// process-wide shared instance.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "newton/corpus.hpp"
#include "newton/drivers.hpp"
#include "newton/line_search.hpp"
#include "newton/linear_solvers.hpp"
#include "newton/trust_region.hpp"

namespace newton {

enum class Category { Problems, LinearSolvers, Conditions, Generators, Subproblems, Drivers };

// "problems", "linear-solvers", "conditions", "generators", "subproblems", "drivers".
std::string_view to_string(Category category);
std::optional<Category> parse_category(std::string_view text);
const std::vector<Category>& all_categories();

class ComponentRegistry {
public:
    using ProblemBuilder = std::function<CorpusEntry()>;
    using LinearSolverBuilder =
        std::function<std::shared_ptr<const LinearSolver>(const SolverConfigMap&)>;
    using ConditionBuilder =
        std::function<std::shared_ptr<const AcceptanceCondition>(const LineSearchParams&)>;
    using GeneratorBuilder =
        std::function<std::shared_ptr<const StepGenerator>(const LineSearchParams&)>;
    using SubproblemBuilder = std::function<std::shared_ptr<const SubproblemSolver>()>;
    using DriverBuilder = std::function<NewtonHooks(const DriverSettings&)>;

    // An empty, unfrozen registry. Only the shared instance is used by the
    // library; local ones exist for tests and embedding.
    ComponentRegistry() = default;
    // Driver builders refer back to their registry, so it never moves.
    ComponentRegistry(const ComponentRegistry&) = delete;
    ComponentRegistry& operator=(const ComponentRegistry&) = delete;

    // The shared instance: built-ins registered, then frozen. Initialized on
    // first use (thread-safe), identical on every later call.
    static ComponentRegistry& instance();

    // Registration throws RegistryFrozen after freeze() and
    // std::invalid_argument on a duplicate name; either way nothing changes.
    void add_problem(const std::string& name, ProblemBuilder builder);
    void add_linear_solver(const std::string& name, LinearSolverBuilder builder);
    void add_condition(const std::string& name, ConditionBuilder builder);
    void add_generator(const std::string& name, GeneratorBuilder builder);
    void add_subproblem(const std::string& name, SubproblemBuilder builder);
    void add_driver(const std::string& name, DriverBuilder builder);

    void freeze() noexcept { frozen_ = true; }
    bool frozen() const noexcept { return frozen_; }
    std::size_t registration_count() const noexcept;

    // Sorted.
    std::vector<std::string> names(Category category) const;
    bool contains(Category category, const std::string& name) const;

    // Lookups throw UnknownComponent (UnknownSolver / UnknownStrategy where
    // that narrower type applies) naming the category.
    CorpusEntry problem(const std::string& name) const;
    std::shared_ptr<const LinearSolver> linear_solver(const std::string& name,
                                                      const SolverConfigMap& config = {}) const;
    std::shared_ptr<const AcceptanceCondition> condition(const std::string& name,
                                                         const LineSearchParams& params) const;
    std::shared_ptr<const StepGenerator> generator(const std::string& name,
                                                   const LineSearchParams& params) const;
    std::shared_ptr<const SubproblemSolver> subproblem(const std::string& name) const;
    NewtonHooks driver(const std::string& name, const DriverSettings& settings) const;

private:
    void check_open(Category category, const std::string& name) const;

    bool frozen_ = false;
    std::map<std::string, ProblemBuilder> problems_;
    std::map<std::string, LinearSolverBuilder> linear_solvers_;
    std::map<std::string, ConditionBuilder> conditions_;
    std::map<std::string, GeneratorBuilder> generators_;
    std::map<std::string, SubproblemBuilder> subproblems_;
    std::map<std::string, DriverBuilder> drivers_;
};

// Registers every built-in component into `registry`.
void register_builtins(ComponentRegistry& registry);

// Same as ComponentRegistry::instance().
ComponentRegistry& registry_init();

}  // namespace newton
