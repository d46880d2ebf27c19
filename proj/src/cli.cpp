#include "newton/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "newton/config.hpp"
#include "newton/errors.hpp"
#include "newton/metrics.hpp"
#include "newton/registry.hpp"

namespace newton {

namespace {

std::string g6(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.6g", value);
    return buffer;
}

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

struct SolveArgs {
    std::string config_path;
    std::string driver;
    std::string problem;
    std::string x0;
    std::string tol;
    std::string max_iter;
    std::string trace_path;
};

void write_trace(std::ostream& out, const SolveResult& result) {
    out << "k,f,grad_norm,step_control,dir_norm,accepted\n";
    for (const TraceRow& row : result.trace) {
        out << row.k << ',' << format_double(row.f) << ',' << format_double(row.grad_norm) << ','
            << format_double(row.step_control) << ',' << format_double(row.dir_norm) << ','
            << (row.accepted ? 1 : 0) << '\n';
    }
}

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
    SolverConfig config;
    if (!args.config_path.empty()) {
        const auto text = read_file(args.config_path);
        if (!text) {
            err << "error: cannot read config file '" << args.config_path << "'\n";
            return kExitUsage;
        }
        std::vector<std::string> warnings;
        try {
            config = parse_config(*text, &warnings);
        } catch (const ParseError& e) {
            err << "error: " << args.config_path << ": " << e.what() << '\n';
            return kExitUsage;
        }
        for (const auto& w : warnings) err << "warning: " << args.config_path << ": " << w << '\n';
    }
    if (!args.driver.empty()) config.driver = args.driver;
    if (!args.problem.empty()) config.problem = args.problem;
    if (!args.x0.empty()) {
        auto x0 = parse_vector(args.x0);
        if (!x0) {
            err << "error: --x0 must be comma-separated finite numbers\n";
            return kExitUsage;
        }
        config.x0 = std::move(*x0);
    }
    if (!args.tol.empty()) config.overrides["grad_tol"] = args.tol;
    if (!args.max_iter.empty()) config.overrides["max_iter"] = args.max_iter;
    if (config.driver.empty()) {
        err << "error: no driver given (use --driver or a config file)\n";
        return kExitUsage;
    }

    std::optional<Solver> solver;
    try {
        solver.emplace(build_solver(config));
    } catch (const UnknownComponent& e) {
        err << "error: " << e.what() << " (see `list " << e.category() << "`)\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    SolveResult result;
    try {
        result = solver->run();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitSolverError;
    }

    out << to_string(result.status) << " x=";
    for (std::size_t i = 0; i < result.x_final.size(); ++i) {
        if (i) out << ',';
        out << g6(result.x_final[i]);
    }
    out << " f=" << g6(result.f_final) << " |g|=" << g6(result.g_norm_final)
        << " iters=" << result.iterations << '\n';
    if (!result.message.empty()) err << result.message << '\n';

    if (!args.trace_path.empty()) {
        std::ofstream trace(args.trace_path, std::ios::binary);
        if (!trace) {
            err << "error: cannot write trace file '" << args.trace_path << "'\n";
            return kExitUsage;
        }
        write_trace(trace, result);
    }

    switch (result.status) {
        case SolveStatus::Converged: return kExitOk;
        case SolveStatus::MaxIterations: return kExitMaxIterations;
        default: return kExitSolverError;
    }
}

int cmd_list(const std::string& category_name, std::ostream& out, std::ostream& err) {
    const auto category = parse_category(category_name);
    if (!category) {
        err << "error: unknown category '" << category_name << "'; expected one of:";
        for (Category c : all_categories()) err << ' ' << to_string(c);
        err << '\n';
        return kExitUsage;
    }
    for (const auto& name : ComponentRegistry::instance().names(*category)) out << name << '\n';
    return kExitOk;
}

int cmd_metrics(const std::string& manifest_path, const std::string& csv_path, std::ostream& out,
                std::ostream& err) {
    const auto text = read_file(manifest_path);
    if (!text) {
        err << "error: cannot read manifest '" << manifest_path << "'\n";
        return kExitUsage;
    }
    DependencyGraph graph;
    try {
        graph = parse_manifest(*text);
    } catch (const Error& e) {
        err << "error: " << manifest_path << ": " << e.what() << '\n';
        return kExitUsage;
    }
    const auto report = analyze(graph);

    out << "package,A,I,D\n";
    for (const PackageMetrics& m : report) {
        if (!m.complete()) {
            err << "warning: " << m.package << ": " << m.annotation << '\n';
            continue;
        }
        out << m.package << ',' << format_2dp(*m.a) << ',' << format_2dp(*m.i) << ','
            << format_2dp(*m.d) << '\n';
    }

    if (!csv_path.empty()) {
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) {
            err << "error: cannot write '" << csv_path << "'\n";
            return kExitUsage;
        }
        auto field = [](const std::optional<double>& v) { return v ? format_double(*v) : ""; };
        csv << "package,A,I,D,N_a,N_c,C_e,C_a\n";
        for (const PackageMetrics& m : report) {
            csv << m.package << ',' << field(m.a) << ',' << field(m.i) << ',' << field(m.d) << ','
                << m.counts.abstract_classes << ',' << m.counts.classes << ','
                << m.counts.efferent << ',' << m.counts.afferent << '\n';
        }
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Newton-type nonlinear solvers and package design metrics", "newton-forge"};
    app.require_subcommand(1);

    SolveArgs solve;
    CLI::App* solve_cmd = app.add_subcommand("solve", "Run a configured solve");
    solve_cmd->add_option("--config", solve.config_path, "key = value config file");
    solve_cmd->add_option("--driver", solve.driver, "driver name (see `list drivers`)");
    solve_cmd->add_option("--problem", solve.problem, "problem name (see `list problems`)");
    solve_cmd->add_option("--x0", solve.x0, "start point, comma-separated")->allow_extra_args(false);
    solve_cmd->add_option("--tol", solve.tol, "gradient tolerance ||g||_inf");
    solve_cmd->add_option("--max-iter", solve.max_iter, "iteration cap");
    solve_cmd->add_option("--trace", solve.trace_path, "write the iteration trace as CSV");

    std::string category;
    CLI::App* list_cmd = app.add_subcommand("list", "List registered components");
    list_cmd->add_option("category", category,
                         "drivers, problems, conditions, generators, subproblems, linear-solvers")
        ->required();

    std::string manifest_path;
    std::string csv_path;
    CLI::App* metrics_cmd = app.add_subcommand("metrics", "Package metrics A, I, D");
    metrics_cmd->add_option("--manifest", manifest_path, "dependency manifest")->required();
    metrics_cmd->add_option("--csv", csv_path, "write full-precision CSV");

    std::vector<const char*> argv{"newton-forge"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    if (solve_cmd->parsed()) return cmd_solve(solve, out, err);
    if (list_cmd->parsed()) return cmd_list(category, out, err);
    return cmd_metrics(manifest_path, csv_path, out, err);
}

}  // namespace newton
