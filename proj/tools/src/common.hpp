#pragma once

#include "hsym/cli/pipelines.hpp"
#include "hsym/hiddenscale.hpp"
#include "hsym/numlab.hpp"
#include "hsym/pertseries.hpp"
#include "hsym/pertsym.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hsym::cli::detail {

using exprcore::Expr;
using Values = std::map<std::string, double>;

struct HiddenScaleRun {
    pertseries::ODEProblem problem;
    pertseries::PerturbationSeries bare;
    std::vector<Expr> residuals;
    bool asymptotic_only = false;
    hiddenscale::PaintedSeries painted;
    hiddenscale::FTSystem ft;
    hiddenscale::ConstantFlows flows;
    hiddenscale::UniformSolution uniform;
};

// order < 0 takes method.order
pertseries::ODEProblem ode_problem(const ProblemSpec& spec, int order = -1);
HiddenScaleRun hidden_scale(const ProblemSpec& spec, int order = -1);
void report_hidden_scale(const HiddenScaleRun& run, RunReport& r);

// Directions, shapes, match symbols and derivative rules from the ansatz section.
pertsym::GeneratorAnsatz ansatz_of(const ProblemSpec& spec);

std::set<std::string> unknown_set(const hiddenscale::FTSystem& ft);

struct FitResult {
    std::vector<double> x;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Newton with a finite-difference Jacobian on a square or overdetermined system.
FitResult newton_fit(const std::function<std::vector<double>(const std::vector<double>&)>& residual,
                     std::vector<double> x0, double tol = 1e-12, int max_iter = 60);

// n-th derivative of f at x0 by central differences.
double derivative_at(const std::function<double(double)>& f, double x0, int n);

// Hand-written right-hand sides for the equations with an independent numeric oracle:
// the highest derivative as a function of (x, y, y', ...).
struct OdeOracle {
    int order = 2;
    std::function<double(double x, const std::vector<double>& y, const Values& p)> highest;
};
std::optional<OdeOracle> oracle_for(const ProblemSpec& spec);

// Fixed-step RK4 on [x0, x1] from the initial state; returns y at xs.
std::vector<double> oracle_curve(const OdeOracle& o, const Values& p, const std::vector<double>& y0, double x0,
                                 const std::vector<double>& xs, double step = 1e-3);

double sup_error(const std::vector<double>& a, const std::vector<double>& b);

// Parameter values from the spec with overrides applied.
Values parameters(const ProblemSpec& spec, const Values& overrides = {});

std::string join(const std::vector<std::string>& items, const std::string& sep);

// Per-kind entry points.
void derive_ode(const ProblemSpec& spec, RunReport& r);
void validate_ode(const ProblemSpec& spec, const RunOptions& opts, RunReport& r);
std::map<std::string, double> metrics_ode(const ProblemSpec& spec, const Values& params);

void derive_switchback(const ProblemSpec& spec, RunReport& r);
void validate_switchback(const ProblemSpec& spec, const RunOptions& opts, RunReport& r);
std::map<std::string, double> metrics_switchback(const ProblemSpec& spec, const Values& params);

void derive_symmetry(const ProblemSpec& spec, RunReport& r);
void validate_symmetry(const ProblemSpec& spec, const RunOptions& opts, RunReport& r);
std::map<std::string, double> metrics_symmetry(const ProblemSpec& spec, const Values& params);

void derive_burgers(const ProblemSpec& spec, RunReport& r);
void validate_burgers(const ProblemSpec& spec, const RunOptions& opts, RunReport& r);
std::map<std::string, double> metrics_burgers(const ProblemSpec& spec, const Values& params);

} // namespace hsym::cli::detail
