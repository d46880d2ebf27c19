// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
//   acceptance [--seed N] [--only K]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "manual_hooks.hpp"
#include "newton/cli.hpp"
#include "newton/corpus.hpp"
#include "newton/drivers.hpp"
#include "newton/errors.hpp"
#include "newton/line_search.hpp"
#include "newton/metrics.hpp"
#include "random_line.hpp"
#include "random_spd.hpp"
#include "reference_solvers.hpp"

using namespace newton;

namespace {

// Tolerances.
constexpr double kOneStepTol = 1e-10;     // ||x_final|| / ||x0|| after one Newton step
constexpr double kRosenbrockTol = 1e-6;   // ||x - (1,1)||_inf
constexpr double kReferenceTol = 1e-6;    // library vs reference x_final
constexpr double kFeasibilityTol = 1e-12; // ||s|| <= radius + tol
constexpr double kOrderingTol = 1e-10;    // m(s_dogleg) <= m(s_cauchy) + tol
constexpr double kDoglegExampleTol = 1e-3;
constexpr double kDerivativeTol = 1e-5;   // analytic vs central differences, relative
constexpr double kCompositionTol = 1e-4;  // J^T F and J^T J + sum F_i H_i vs differences
constexpr double kEquivalenceTol = 1e-6;
constexpr double kSecantTol = 1e-10;

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double budget_seconds;
    std::function<Outcome(std::uint64_t)> run;
};

// Collects the first few failure messages.
class Failures {
public:
    void add(const std::string& message) {
        if (count_++ < 3) messages_ += (messages_.empty() ? "" : "; ") + message;
    }
    Outcome outcome(const std::string& ok_detail) const {
        if (count_ == 0) return {true, ok_detail};
        return {false, std::to_string(count_) + " failures: " + messages_};
    }

private:
    std::size_t count_ = 0;
    std::string messages_;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double rel_err(const Vector& a, const Vector& b) {
    return norm_inf(subtract(a, b)) / std::max(1.0, norm_inf(a));
}

double rel_err(const DenseMatrix& a, const DenseMatrix& b) {
    return norm_inf(subtract(Vector(a.data().begin(), a.data().end()), Vector(b.data().begin(), b.data().end()))) /
           std::max(1.0, norm_inf(a.data()));
}

Outcome table_reproduction(std::uint64_t) {
    Failures f;
    const std::string path = NEWTON_FORGE_DATA_DIR "/reference_architecture.manifest";
    std::ostringstream out, err;
    const int code = run_cli({"metrics", "--manifest", path}, out, err);
    if (code != kExitOk) f.add("metrics exited " + std::to_string(code));
    const std::vector<std::string> expected{
        "TrustRegionMethods,0.29,0.80,0.09", "BaseArchitecture,0.75,0.31,0.06",
        "LineSearchMethods,0.20,0.70,0.10", "NonlinearMethods,0.29,0.46,0.25"};
    std::vector<std::string> lines;
    std::istringstream in(out.str());
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    for (const auto& want : expected) {
        if (std::find(lines.begin(), lines.end(), want) == lines.end()) f.add("missing row " + want);
    }
    for (const auto& m : analyze(parse_manifest(read_file(path)))) {
        if (m.complete() && *m.d != std::abs(*m.a + *m.i - 1.0)) f.add("D identity broken for " + m.package);
    }
    return f.outcome("4 rows match");
}

DependencyGraph random_graph(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> packages_d(1, 10), classes_d(0, 50);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DependencyGraph g;
    const int packages = packages_d(rng);
    for (int p = 0; p < packages; ++p) g.add_package("pkg" + std::to_string(p));
    const int classes = classes_d(rng);
    std::uniform_int_distribution<int> pick_pkg(0, packages - 1);
    for (int c = 0; c < classes; ++c) {
        g.add_class("pkg" + std::to_string(pick_pkg(rng)), "C" + std::to_string(c), u(rng) < 0.3);
    }
    if (classes >= 2) {
        std::uniform_int_distribution<int> pick(0, classes - 1);
        const int edges = static_cast<int>(u(rng) * 3 * classes);
        for (int e = 0; e < edges; ++e) {
            const int a = pick(rng), b = pick(rng);
            if (a == b) continue;
            try {
                g.add_edge(g.classes[a].qualified(), g.classes[b].qualified());
            } catch (const std::invalid_argument&) {
            }
        }
    }
    return g;
}

Outcome d_identity(std::uint64_t seed) {
    Failures f;
    std::mt19937_64 rng(seed);
    std::size_t checked = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto g = random_graph(rng);
        std::size_t total = 0;
        for (const auto& m : analyze(g)) {
            total += m.counts.classes;
            if (!m.complete()) continue;
            ++checked;
            if (std::abs(*m.a + *m.i - 1.0) != *m.d) f.add("graph " + std::to_string(t) + " " + m.package);
        }
        if (total != g.classes.size()) f.add("graph " + std::to_string(t) + " lost classes");
    }
    return f.outcome(std::to_string(checked) + " package rows");
}

ProblemDefinition spd_quadratic(const DenseMatrix& a) {
    return make_objective_problem(
        "spd-quadratic", a.rows(), [a](const Vector& x) { return 0.5 * quadratic_form(a, x); },
        [a](const Vector& x) { return multiply(a, x); }, [a](const Vector&) { return a; });
}

Outcome one_step_newton(std::uint64_t seed) {
    Failures f;
    std::mt19937_64 rng(seed);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + t % 8;
        const auto a = testing_support::random_spd(rng, n, 1e3);
        const Vector x0 = testing_support::random_vector(rng, n, 5.0);
        const auto r = damped_newton_driver(spd_quadratic(a), x0, StoppingCriteria{});
        if (r.status != SolveStatus::Converged || r.iterations != 1) {
            f.add("case " + std::to_string(t) + ": " + std::string(to_string(r.status)) + " after " +
                  std::to_string(r.iterations));
        } else if (norm2(r.x_final) > kOneStepTol * norm2(x0)) {
            f.add("case " + std::to_string(t) + ": ||x|| = " + fmt(norm2(r.x_final)));
        }
    }
    return f.outcome("100 quadratics, n <= 8");
}

struct RosenbrockRuns {
    std::vector<std::pair<std::string, SolveResult>> runs;
};

RosenbrockRuns rosenbrock_runs() {
    RosenbrockRuns out;
    const auto& rosen = corpus_entry("rosenbrock");
    const auto& residual = corpus_entry("rosenbrock-residual");
    const StoppingCriteria c{};
    out.runs.emplace_back("damped-newton", damped_newton_driver(rosen.problem, {-1.2, 1.0}, c));
    out.runs.emplace_back("trust-region-newton", trust_region_driver(rosen.problem, {-1.2, 1.0}, c, "dogleg"));
    out.runs.emplace_back("bfgs", quasi_newton_driver(rosen.problem, {-1.2, 1.0}, c));
    out.runs.emplace_back("inexact-newton", inexact_newton_driver(rosen.problem, {-1.2, 1.0}, c));
    out.runs.emplace_back("gauss-newton", gauss_newton_driver(residual.problem, {-1.2, 1.0}, c));
    return out;
}

Outcome rosenbrock(std::uint64_t) {
    Failures f;
    const auto runs = rosenbrock_runs();
    const std::map<std::string, reference::Outcome> refs{
        {"damped-newton", reference::damped_newton({-1.2, 1.0})},
        {"trust-region-newton", reference::trust_region_dogleg({-1.2, 1.0})},
        {"bfgs", reference::bfgs({-1.2, 1.0})},
        {"inexact-newton", reference::damped_newton({-1.2, 1.0})},
        {"gauss-newton", reference::gauss_newton({-1.2, 1.0})},
    };
    std::string iters;
    for (const auto& [name, r] : runs.runs) {
        const double err = norm_inf(subtract(r.x_final, {1.0, 1.0}));
        if (r.status != SolveStatus::Converged || r.iterations > 200 || err > kRosenbrockTol) {
            f.add(name + ": " + std::string(to_string(r.status)) + " err " + fmt(err));
        }
        const auto& ref = refs.at(name);
        if (!ref.converged) f.add(name + ": reference did not converge");
        const double gap = std::max(std::abs(r.x_final[0] - ref.x[0]), std::abs(r.x_final[1] - ref.x[1]));
        if (gap > kReferenceTol) f.add(name + ": differs from reference by " + fmt(gap));
        iters += (iters.empty() ? "" : " ") + name + "=" + std::to_string(r.iterations);
    }
    return f.outcome(iters);
}

// Records every proposal so the safeguard bracket can be checked on live searches.
class RecordingGenerator final : public StepGenerator {
public:
    explicit RecordingGenerator(std::shared_ptr<const StepGenerator> inner) : inner_(std::move(inner)) {}
    std::string name() const override { return inner_->name(); }
    double propose(const Bracket& b) const override {
        const double t = inner_->propose(b);
        proposals.emplace_back(b.width, t);
        return t;
    }
    mutable std::vector<std::pair<double, double>> proposals;

private:
    std::shared_ptr<const StepGenerator> inner_;
};

Outcome line_search_soundness(std::uint64_t seed) {
    Failures f;
    std::mt19937_64 rng(seed);
    const LineSearchParams params;
    const std::vector<std::string> conditions{"armijo", "wolfe", "strong-wolfe", "goldstein"};
    const std::vector<std::string> generators{"bisection", "backtracking-quadratic", "backtracking-cubic"};
    std::size_t successes = 0, proposals = 0;
    for (int t = 0; t < 500; ++t) {
        const auto phi = testing_support::random_phi(rng);
        const auto lf = phi.line();
        for (const auto& c : conditions) {
            const auto cond = make_condition(c, params);
            for (const auto& g : generators) {
                RecordingGenerator gen(make_generator(g, params));
                try {
                    const auto r = line_search(lf, *cond, gen, params);
                    const Trial trial{r.lambda, phi.value(r.lambda), phi.slope(r.lambda)};
                    if (!cond->holds(lf, trial)) f.add(c + "/" + g + " accepted " + fmt(r.lambda));
                    ++successes;
                } catch (const LineSearchFailed&) {
                }
                if (g == "bisection") continue;
                for (const auto& [width, step] : gen.proposals) {
                    ++proposals;
                    if (step < params.safeguard_low * width || step > params.safeguard_high * width) {
                        f.add(g + " step " + fmt(step / width) + " of bracket");
                    }
                }
            }
        }
    }
    const LineFunction parabola{[](double t) { return (1 - t) * (1 - t); }, [](double t) { return -2 * (1 - t); },
                                1.0, -2.0};
    for (const auto& c : conditions) {
        for (const auto& g : generators) {
            try {
                line_search(parabola, c, g, params);
            } catch (const Error& e) {
                f.add(c + "/" + g + " on (1-t)^2: " + e.what());
            }
        }
    }
    return f.outcome(std::to_string(successes) + " searches, " + std::to_string(proposals) +
                     " interpolated steps, 12 pairs on (1-t)^2");
}

Outcome trust_region_ordering(std::uint64_t seed) {
    Failures f;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 2 + t % 7;
        const QuadraticModel qm{0.0, testing_support::random_vector(rng, n), testing_support::random_spd(rng, n, 1e3)};
        const double radius = std::pow(10.0, -2.0 + 3.0 * u(rng));
        const Vector sn = solve_cholesky(qm.H, negated(qm.g), false).solution;
        const Vector sc = cauchy_point(qm, radius);
        const Vector sd = dogleg_step(qm, radius, sn);
        const Vector s2 = subspace_2d_step(qm, radius, sn);
        for (const Vector* s : {&sc, &sd, &s2}) {
            if (norm2(*s) > radius + kFeasibilityTol) f.add("case " + std::to_string(t) + " infeasible");
        }
        const double mc = model_value(qm, sc), md = model_value(qm, sd), m2 = model_value(qm, s2);
        if (!(m2 <= md && md <= mc + kOrderingTol)) {
            f.add("case " + std::to_string(t) + " order " + fmt(m2) + " " + fmt(md) + " " + fmt(mc));
        }
    }
    const QuadraticModel example{0.0, {1.0, 1.0}, DenseMatrix::diagonal({1.0, 4.0})};
    const Vector s = dogleg_step(example, 0.8, {-1.0, -0.25});
    if (std::abs(s[0] + 0.7348) > kDoglegExampleTol || std::abs(s[1] + 0.3163) > kDoglegExampleTol) {
        f.add("boundary example gave (" + fmt(s[0]) + ", " + fmt(s[1]) + ")");
    }
    return f.outcome("500 models, boundary example ok");
}

// The merit objective alone, so differences see nothing but f.
ProblemDefinition objective_only(const ProblemDefinition& p) {
    auto residual = p.residual;
    return make_objective_problem(p.name + "-merit", p.n,
                                  [residual](const Vector& x) { return half_squared_norm(residual(x)); });
}

Outcome derivative_oracles(std::uint64_t seed) {
    Failures f;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0, worst_composed = 0.0;
    for (const auto& e : problem_corpus()) {
        const auto& p = e.problem;
        for (int k = 0; k < 20; ++k) {
            Vector x = e.standard_start;
            for (double& v : x) v += u(rng) * std::max(1.0, std::abs(v));
            if (p.gradient) {
                const double err = rel_err(p.gradient(x), fd_gradient(p, x));
                worst = std::max(worst, err);
                if (err > kDerivativeTol) f.add(p.name + " gradient " + fmt(err));
            }
            if (p.jacobian) {
                const double err = rel_err(p.jacobian(x), fd_jacobian(p, x));
                worst = std::max(worst, err);
                if (err > kDerivativeTol) f.add(p.name + " jacobian " + fmt(err));
            }
            if (!p.has_residual()) continue;
            const auto merit = transform_ne_to_uo(p);
            const auto plain = objective_only(p);
            const auto rec = evaluate(merit, x, Quantity::Gradient | Quantity::Hessian);
            const double eg = rel_err(*rec.g, fd_gradient(plain, x));
            const double eh = rel_err(*rec.H, fd_hessian(plain, x));
            worst_composed = std::max({worst_composed, eg, eh});
            if (eg > kCompositionTol) f.add(p.name + " composed gradient " + fmt(eg));
            if (eh > kCompositionTol) f.add(p.name + " composed hessian " + fmt(eh));
        }
    }
    return f.outcome("worst " + fmt(worst) + ", composed " + fmt(worst_composed));
}

Outcome kind_equivalence(std::uint64_t) {
    Failures f;
    const auto& e = corpus_entry("linear-system");
    const auto a = damped_newton_driver(e.problem, e.standard_start, StoppingCriteria{});
    const auto b = gauss_newton_driver(e.problem, e.standard_start, StoppingCriteria{});
    if (a.status != SolveStatus::Converged) f.add("merit route " + std::string(to_string(a.status)));
    if (b.status != SolveStatus::Converged) f.add("least-squares route " + std::string(to_string(b.status)));
    const double gap = norm_inf(subtract(a.x_final, b.x_final));
    if (gap > kEquivalenceTol) f.add("gap " + fmt(gap));
    return f.outcome("gap " + fmt(gap));
}

Outcome template_identity(std::uint64_t) {
    Failures f;
    std::size_t runs = 0;
    for (const char* driver : {"damped-newton", "trust-region-newton", "bfgs", "inexact-newton", "gauss-newton"}) {
        for (const auto& e : problem_corpus()) {
            if (std::string(driver) == "gauss-newton" && !e.problem.has_residual()) continue;
            const auto s = default_settings(driver);
            const auto named = run_driver(driver, e.problem, e.standard_start, s);
            const auto manual = newton_iterate(testing_support::manual_hooks(driver, s),
                                               prepare_problem(driver, e.problem), e.standard_start, s.criteria);
            ++runs;
            if (named.trace != manual.trace || named.status != manual.status) {
                f.add(std::string(driver) + " on " + e.problem.name);
            }
        }
    }
    return f.outcome(std::to_string(runs) + " runs identical");
}

Outcome bfgs_properties(std::uint64_t) {
    Failures f;
    double worst = 0.0;
    for (const auto& [name, r] : rosenbrock_runs().runs) {
        if (name != "bfgs") continue;
        worst = r.stats.max_secant_residual;
        if (r.stats.bfgs_updates == 0) f.add("no updates");
        if (worst > kSecantTol) f.add("secant residual " + fmt(worst));
    }
    for (const auto& e : problem_corpus()) {
        const auto r = quasi_newton_driver(e.problem, e.standard_start, StoppingCriteria{});
        if (r.eval_counts.H != 0) f.add(e.problem.name + " evaluated H");
    }
    return f.outcome("max secant residual " + fmt(worst) + ", no Hessians");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    std::uint64_t seed = 20240607;
    int only = 0;
    app.add_option("--seed", seed, "random seed");
    app.add_option("--only", only, "run a single criterion");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "package metrics table", 1.0, table_reproduction},
        {2, "distance identity on random graphs", 5.0, d_identity},
        {3, "one-step Newton on quadratics", 5.0, one_step_newton},
        {4, "Rosenbrock convergence", 5.0, rosenbrock},
        {5, "line-search soundness", 10.0, line_search_soundness},
        {6, "trust-region ordering and feasibility", 10.0, trust_region_ordering},
        {7, "derivative oracles", 5.0, derivative_oracles},
        {8, "problem-kind equivalence", 1.0, kind_equivalence},
        {9, "template identity", 5.0, template_identity},
        {10, "BFGS secant and Hessian-free", 2.0, bfgs_properties},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run(seed + static_cast<std::uint64_t>(c.id));
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.pass && seconds > c.budget_seconds) {
            o = {false, o.detail + "; over budget " + fmt(c.budget_seconds) + " s"};
        }
        if (!o.pass) ++failed;
        std::printf("criterion %d: %s %s (%s; %.3f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title.c_str(),
                    o.detail.c_str(), seconds);
    }
    return failed == 0 ? 0 : 1;
}
