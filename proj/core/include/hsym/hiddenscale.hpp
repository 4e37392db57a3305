#pragma once

#include "hsym/exprcore.hpp"
#include "hsym/numlab.hpp"
#include "hsym/pertseries.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hsym::hiddenscale {

using exprcore::Expr;
using exprcore::Q;
using pertseries::PerturbationSeries;

enum class ClassifierMode { PolynomialGrowth, UserDeclared };

struct Classifier {
    ClassifierMode mode = ClassifierMode::PolynomialGrowth;
    exprcore::DivergencePredicate pred;  // consulted first in both modes
};

struct PaintedSeries {
    PerturbationSeries series;                 // painted orders
    std::vector<std::vector<Expr>> derivs;     // derivs[d-1][j]: painted d-th derivative of order j
    std::vector<Expr> painted_terms;           // unpainted divergent part of each order
    std::string mu = "mu";

    const Expr& row(int d, int j) const { return d == 0 ? series.orders.at(j) : derivs.at(d - 1).at(j); }
    int n_derivs() const { return static_cast<int>(derivs.size()); }
};

// Replace the powers of var in divergent terms by powers of mu.
Expr paint_expr(const Expr& e, const std::string& var, const std::string& mu, const Classifier& cls);
PaintedSeries paint(const PerturbationSeries& s, int n_derivs, const Classifier& cls = {}, const std::string& mu = "mu");

struct FTOptions {
    int reference_order = 0;
    std::vector<std::string> unknowns;          // default: constants of the reference order
    std::map<std::string, Q> order_assumptions; // symbol -> order in the parameter
};

struct FTSystem {
    std::vector<std::string> unknowns;
    std::vector<Expr> rhs;                       // d unknown / d mu
    std::vector<std::vector<Expr>> by_order;     // by_order[i][p]: coefficient of param^(r+p)
    std::string param = "eps";
    std::string mu = "mu";
    std::string var = "x";
    int order = 1;
    int reference_order = 0;
    std::vector<int> rows_used;                  // derivative rows needed at each relative order
    std::map<std::string, Q> order_assumptions;
    bool asymptotic_only = false;

    const Expr& rhs_of(const std::string& u) const;
};

FTSystem derive_ft_system(const PaintedSeries& ps, int k, const FTOptions& opts = {});

struct FilterResult {
    PerturbationSeries series;
    bool asymptotic_only = false;
};

// Keep only the highest power of `rank_symbol` (default: the series variable) at each
// order above the reference order; orders without divergence are unchanged.
FilterResult most_divergent_filter(const PerturbationSeries& s, const std::string& rank_symbol = "",
                                   int reference_order = 0);

enum class FlowKind { Closed, Rational, Log, Numeric };

struct Flow {
    FlowKind kind = FlowKind::Numeric;
    Expr at_zero;   // Closed: value at mu = 0. Log: the non-log part
    Expr num, den;  // Rational: num / den at mu = 0
    Expr coef, arg; // Log: at_zero + coef*ln(arg)
    std::optional<Expr> along;  // value at general mu, when in class
};

struct OrbitOptions {
    bool frozen_coefficients = false;           // A(0) = A~ - integral of F at frozen tilde values
    std::string tilde_suffix = "~";
};

struct ConstantFlows {
    std::vector<std::string> unknowns;
    std::vector<std::string> tildes;
    std::vector<Flow> flows;
    std::string x;   // symbol carrying the start point mu = x
    FTSystem ft;

    bool all_closed() const;
    bool any_numeric() const;
    // Values at mu = 0 for start point x and tilde values. Uses RK45 for numeric flows.
    std::vector<double> at_zero(double x, const std::map<std::string, double>& values) const;
};

// Integral from 0 to mu of an in-class expression (mu-linear exponents with
// invertible single-term frequencies).
Expr antiderivative(const Expr& e, const std::string& mu);

ConstantFlows integrate_orbits(const FTSystem& ft, const std::string& x_symbol, const OrbitOptions& opts = {});

struct LogForm {
    Expr c0;
    Expr coef;
    Expr arg;

    // Move a pure-exponential constant factor of arg into c0 and scale arg to constant term 1.
    LogForm normalized(const std::string& var) const;
    double evaluate(const std::map<std::string, double>& values) const;
    std::string to_string() const;
    friend bool operator==(const LogForm& a, const LogForm& b);
};

using Binder = std::function<void(double x, std::map<std::string, double>& values)>;

struct UniformSolution {
    std::optional<Expr> symbolic;
    std::optional<LogForm> log_form;
    Expr special;                      // painted series at mu = 0
    ConstantFlows flows;
    std::string var;
    Binder binder;                     // fills opaque symbols (special functions of x)
    bool asymptotic_only = false;
    std::string provenance;

    double operator()(double x, const std::map<std::string, double>& values) const;
    std::vector<double> on_grid(const std::vector<double>& xs, const std::map<std::string, double>& values) const;
};

struct AssembleOptions {
    std::map<std::string, Expr> fixed;   // values of non-flowing constants (default 0)
};

UniformSolution assemble_uniform(const PaintedSeries& ps, const ConstantFlows& flows, const AssembleOptions& opts = {});

struct CGOResult {
    std::vector<Expr> equations;          // one per row, = 0
    std::vector<std::string> unknowns;    // derivative symbols A', B', ...
    std::map<std::string, Expr> solution; // when determined
    bool underdetermined = false;
    bool inconsistent = false;
    std::string diagnostic;
};

// Rows d/dx0 (D^d Y) + sum_i A_i' d/dA_i (D^d Y) at x = x0 for d = 0..n_derivs, with A_i'
// counted as O(param) and truncated at order k. split_params are the free splitting symbols.
CGOResult cgo_rg_equation(const Expr& split_series, const std::string& var, const std::string& x0,
                          const std::vector<std::string>& constants, const std::string& param, int k, int n_derivs,
                          const std::vector<std::string>& split_params = {});

// "lhs = rhs" with factored coefficients, e.g. "theta' = -eps*(cos(2*theta)+a1)".
std::string format_equation(const std::string& lhs, const Expr& rhs, const std::set<std::string>& unknowns);

// Power of param in the leading coefficient of `unknown` in rhs (for order checks).
std::optional<Q> leading_order(const Expr& rhs, const std::string& param);

} // namespace hsym::hiddenscale
