#include "newton/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "newton/errors.hpp"

namespace newton {

namespace {

std::pair<std::string, std::string> split_qualified(std::string_view qualified) {
    const auto dot = qualified.rfind('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == qualified.size()) return {};
    return {std::string(qualified.substr(0, dot)), std::string(qualified.substr(dot + 1))};
}

std::vector<std::string> tokens(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    for (std::string word; in >> word;) out.push_back(word);
    return out;
}

}  // namespace

void DependencyGraph::add_package(const std::string& name) {
    if (name.empty()) throw std::invalid_argument("package name must be non-empty");
    if (!packages.insert(name).second) {
        throw std::invalid_argument("package '" + name + "' declared twice");
    }
}

std::size_t DependencyGraph::add_class(const std::string& package, const std::string& name,
                                       bool abstract) {
    if (!packages.count(package)) throw UnknownPackage("unknown package '" + package + "'");
    if (name.empty()) throw std::invalid_argument("class name must be non-empty");
    if (find_class(package + "." + name)) {
        throw std::invalid_argument("class '" + package + "." + name + "' declared twice");
    }
    classes.push_back({package, name, abstract});
    return classes.size() - 1;
}

void DependencyGraph::add_edge(const std::string& from_qualified, const std::string& to_qualified) {
    const auto from = find_class(from_qualified);
    if (!from) throw UndeclaredClass("undeclared class '" + from_qualified + "'");
    const auto to = find_class(to_qualified);
    if (!to) throw UndeclaredClass("undeclared class '" + to_qualified + "'");
    if (*from == *to) throw std::invalid_argument("self-edge on '" + from_qualified + "'");
    edges.emplace_back(*from, *to);
}

std::optional<std::size_t> DependencyGraph::find_class(std::string_view qualified) const {
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const ClassDecl& c = classes[i];
        if (qualified.size() == c.package.size() + 1 + c.name.size() &&
            qualified.substr(0, c.package.size()) == c.package &&
            qualified[c.package.size()] == '.' &&
            qualified.substr(c.package.size() + 1) == c.name) {
            return i;
        }
    }
    return std::nullopt;
}

PackageCounts package_counts(const DependencyGraph& g, const std::string& package) {
    if (!g.packages.count(package)) throw UnknownPackage("unknown package '" + package + "'");
    PackageCounts counts;
    for (const ClassDecl& c : g.classes) {
        if (c.package != package) continue;
        ++counts.classes;
        if (c.abstract) ++counts.abstract_classes;
    }
    std::set<std::size_t> efferent;
    std::set<std::size_t> afferent;
    for (const auto& [from, to] : g.edges) {
        const bool from_inside = g.classes[from].package == package;
        const bool to_inside = g.classes[to].package == package;
        if (from_inside && !to_inside) efferent.insert(from);
        if (!from_inside && to_inside) afferent.insert(from);
    }
    counts.efferent = efferent.size();
    counts.afferent = afferent.size();
    return counts;
}

double abstractness(const DependencyGraph& g, const std::string& package) {
    const PackageCounts c = package_counts(g, package);
    if (c.classes == 0) throw EmptyPackage("package '" + package + "' has no classes");
    return static_cast<double>(c.abstract_classes) / static_cast<double>(c.classes);
}

double instability(const DependencyGraph& g, const std::string& package) {
    const PackageCounts c = package_counts(g, package);
    if (c.efferent + c.afferent == 0) {
        throw IsolatedPackage("package '" + package + "' has no cross-package dependencies");
    }
    return static_cast<double>(c.efferent) / static_cast<double>(c.efferent + c.afferent);
}

double distance(double a, double i) { return std::abs(a + i - 1.0); }

std::vector<PackageMetrics> analyze(const DependencyGraph& g) {
    std::vector<PackageMetrics> out;
    for (const std::string& package : g.packages) {
        PackageMetrics m;
        m.package = package;
        m.counts = package_counts(g, package);
        std::vector<std::string> notes;
        try {
            m.a = abstractness(g, package);
        } catch (const EmptyPackage& e) {
            notes.emplace_back(e.what());
        }
        try {
            m.i = instability(g, package);
        } catch (const IsolatedPackage& e) {
            notes.emplace_back(e.what());
        }
        if (m.a && m.i) m.d = distance(*m.a, *m.i);
        for (const std::string& note : notes) {
            if (!m.annotation.empty()) m.annotation += "; ";
            m.annotation += note;
        }
        out.push_back(std::move(m));
    }
    std::stable_sort(out.begin(), out.end(), [](const PackageMetrics& x, const PackageMetrics& y) {
        if (x.complete() != y.complete()) return x.complete();
        if (x.complete() && *x.d != *y.d) return *x.d > *y.d;
        return x.package < y.package;
    });
    return out;
}

DependencyGraph parse_manifest(std::string_view text) {
    struct ClassLine {
        std::size_t line;
        std::string package, name;
        bool abstract;
    };
    struct EdgeLine {
        std::size_t line;
        std::string from, to;
    };
    std::vector<std::pair<std::size_t, std::string>> package_lines;
    std::vector<ClassLine> class_lines;
    std::vector<EdgeLine> edge_lines;

    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const auto words = tokens(raw);
        if (words.empty()) continue;
        const std::string& head = words[0];
        if (head == "package") {
            if (words.size() != 2) throw ParseError(line_no, "expected 'package <name>'");
            package_lines.emplace_back(line_no, words[1]);
        } else if (head == "class") {
            if (words.size() != 3 || (words[2] != "abstract" && words[2] != "concrete")) {
                throw ParseError(line_no, "expected 'class <pkg>.<Class> abstract|concrete'");
            }
            auto [package, name] = split_qualified(words[1]);
            if (package.empty()) throw ParseError(line_no, "class name must be <pkg>.<Class>");
            class_lines.push_back({line_no, std::move(package), std::move(name), words[2] == "abstract"});
        } else if (head == "depends") {
            if (words.size() != 4 || words[2] != "->") {
                throw ParseError(line_no, "expected 'depends <pkg>.<Class> -> <pkg>.<Class>'");
            }
            edge_lines.push_back({line_no, words[1], words[3]});
        } else {
            throw ParseError(line_no, "unknown directive '" + head + "'");
        }
    }
    if (package_lines.empty()) throw ParseError(std::max<std::size_t>(line_no, 1), "no packages declared");

    DependencyGraph g;
    for (const auto& [line, name] : package_lines) {
        if (g.packages.count(name)) throw ParseError(line, "package '" + name + "' declared twice");
        g.add_package(name);
    }
    for (const ClassLine& c : class_lines) {
        if (!g.packages.count(c.package)) {
            throw ParseError(c.line, "class in undeclared package '" + c.package + "'");
        }
        if (g.find_class(c.package + "." + c.name)) {
            throw ParseError(c.line, "class '" + c.package + "." + c.name + "' declared twice");
        }
        g.add_class(c.package, c.name, c.abstract);
    }
    for (const EdgeLine& e : edge_lines) {
        for (const std::string* end : {&e.from, &e.to}) {
            if (!g.find_class(*end)) {
                throw UndeclaredClass("line " + std::to_string(e.line) + ": undeclared class '" +
                                      *end + "'");
            }
        }
        if (e.from == e.to) throw ParseError(e.line, "self-edge on '" + e.from + "'");
        g.add_edge(e.from, e.to);
    }
    return g;
}

double round_half_up_2(double value) {
    // The epsilon treats values like 0.285 (stored just below) as their decimal text.
    return std::floor(value * 100.0 + 0.5 + 1e-9) / 100.0;
}

std::string format_2dp(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.2f", round_half_up_2(value));
    return buffer;
}

}  // namespace newton
