#pragma once

#include "hsym/cli/report.hpp"
#include "hsym/cli/spec.hpp"

#include <map>
#include <string>
#include <vector>

namespace hsym::cli {

struct RunOptions {
    bool numeric = false;             // validate: run oracles and numeric checks
    bool compare_textbook = false;
    unsigned seed = 20240611;         // randomized checks only
};

RunReport run_derive(const ProblemSpec& spec);
RunReport run_validate(const ProblemSpec& spec, const RunOptions& opts);

struct SweepPoint {
    std::map<std::string, double> params;
    std::map<std::string, double> metrics;
    std::string error;                // non-empty when the point failed
};

// Cartesian product of the sweep.<sym> lists, evaluated concurrently; points come back
// in lexicographic order of the sweep lists.
std::vector<SweepPoint> run_sweep(const ProblemSpec& spec, unsigned threads);
RunReport sweep_report(const ProblemSpec& spec, const std::vector<SweepPoint>& points);

// Error metrics of the uniform and bare solutions at one parameter point.
std::map<std::string, double> point_metrics(const ProblemSpec& spec, const std::map<std::string, double>& params);

} // namespace hsym::cli
