#pragma once

#include <string>
#include <vector>

#include "newton/problem.hpp"

namespace newton {

struct CorpusEntry {
    ProblemDefinition problem;
    Vector standard_start;
    Vector minimizer;
    double minimum = 0.0;
    std::string description;
};

// quadratic, rosenbrock, rosenbrock-residual, linear-system, powell-badly-scaled;
// in that order.
const std::vector<CorpusEntry>& problem_corpus();

// Throws UnknownComponent (category "problems").
const CorpusEntry& corpus_entry(const std::string& name);

}  // namespace newton
