#pragma once

// Package metrics over a class-level dependency graph:
//   A = N_a / N_c
//   I = C_e / (C_e + C_a)
//   D = |A + I - 1|
// C_e counts classes inside the package with at least one edge leaving it;
// C_a counts classes outside with at least one edge into it.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace newton {

struct ClassDecl {
    std::string package;
    std::string name;
    bool abstract = false;

    std::string qualified() const { return package + "." + name; }
};

struct DependencyGraph {
    std::set<std::string> packages;
    std::vector<ClassDecl> classes;
    // Indices into `classes`; first depends on second.
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    // Throws std::invalid_argument on a duplicate package.
    void add_package(const std::string& name);
    // Throws UnknownPackage, or std::invalid_argument on a duplicate class.
    std::size_t add_class(const std::string& package, const std::string& name, bool abstract);
    // Throws UndeclaredClass for an unknown endpoint, std::invalid_argument on a
    // self-edge. Repeated edges are kept but do not change any count.
    void add_edge(const std::string& from_qualified, const std::string& to_qualified);

    std::optional<std::size_t> find_class(std::string_view qualified) const;
};

struct PackageCounts {
    std::size_t abstract_classes = 0;  // N_a
    std::size_t classes = 0;           // N_c
    std::size_t efferent = 0;          // C_e
    std::size_t afferent = 0;          // C_a
};

// Throws UnknownPackage.
PackageCounts package_counts(const DependencyGraph& g, const std::string& package);

// Throws EmptyPackage when the package has no classes.
double abstractness(const DependencyGraph& g, const std::string& package);
// Throws IsolatedPackage when C_e + C_a = 0.
double instability(const DependencyGraph& g, const std::string& package);
double distance(double a, double i);

struct PackageMetrics {
    std::string package;
    PackageCounts counts;
    std::optional<double> a;
    std::optional<double> i;
    std::optional<double> d;
    std::string annotation;  // empty when every metric is defined

    bool complete() const { return a && i && d; }
};

// Every package, sorted by D descending (ties by name); packages with an
// annotation come last in name order.
std::vector<PackageMetrics> analyze(const DependencyGraph& g);

// Manifest lines: `package <name>`, `class <pkg>.<Class> abstract|concrete`,
// `depends <pkg>.<Class> -> <pkg>.<Class>`, `#` comments. Declarations may
// appear in any order. Throws ParseError(line) or UndeclaredClass.
DependencyGraph parse_manifest(std::string_view text);

// Half-up rounding to 2 decimals, e.g. 0.285714 -> 0.29, 0.125 -> 0.13.
double round_half_up_2(double value);
// "0.29"
std::string format_2dp(double value);

}  // namespace newton
