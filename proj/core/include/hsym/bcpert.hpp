#pragma once

#include "hsym/exprcore.hpp"
#include "hsym/hiddenscale.hpp"

#include <map>
#include <string>
#include <vector>

namespace hsym::bcpert {

using exprcore::Expr;

// e_n(x) = integral from x to infinity of r^-n e^-r dr, for x > 0. Throws std::domain_error otherwise.
double exp_integral(int n, double x);

// Opaque symbols used by the switchback closed forms:
//   E1 = e_1(x), E12 = e_1(2x), E2 = e_2(x), and the same at x = eps with suffix "eps".
void bind_exp_integrals(double x, double eps, std::map<std::string, double>& values);

// Chain rules for the opaque symbols, so residuals can be checked symbolically in x.
exprcore::DiffContext switchback_diff_context();

struct SwitchbackProblem {
    int n = 2;        // dimension
    int delta = 1;
    double eps = 1e-4;
    double a = 1.0;
    int order = 2;
};

struct SwitchbackSeries {
    SwitchbackProblem problem;
    std::vector<Expr> orders;                              // arbitrary constants A, B (order 1), C, D (order 2)
    std::vector<std::pair<std::string, int>> constants;
    std::map<std::string, Expr> bc_values;                 // constants fixed by u(eps) = 1 - a, u(inf) = 1
    std::vector<Expr> fitted;                              // orders with the constants substituted

    // Truncated sum at order m (<= problem.order) with fitted constants, at parameter value a.
    double operator()(double x, int m) const;
    double operator()(double x) const { return (*this)(x, problem.order); }
};

// Left side of the order-j equation applied to orders[j] minus its forcing, with the
// opaque chain rules; zero for a correct series.
Expr switchback_residual(const SwitchbackSeries& s, int j);

SwitchbackSeries switchback_series(const SwitchbackProblem& p);

struct MostDivergentSum {
    hiddenscale::LogForm form;          // in E1, E1eps and a; constant term of the argument is 1
    hiddenscale::LogForm free_form;     // 1 + ln(1 + a*B*E1) before the boundary conditions
    double eps = 0.0;
    double a = 1.0;

    double operator()(double x) const;
    double radius(double x) const;      // a* = e_1(eps)/e_1(x)
};

MostDivergentSum most_divergent_sum(double eps, double a);

// Partial sums of the most divergent terms: sum_{n=1..N} (-1)^{n+1} z^n / n with z = a*B*e_1(x).
double most_divergent_partial_sum(double z, int terms);

// ln(e + (1 - e) E1/E1eps) as a LogForm.
hiddenscale::LogForm terrible_exact_asymptotic();

struct TerribleHiddenScale {
    hiddenscale::FTSystem ft;
    hiddenscale::ConstantFlows flows;
    hiddenscale::UniformSolution tau_form;   // 1 + a*A~ + ln(1 + a*B~*tau)
    hiddenscale::UniformSolution solution;   // in x, boundary conditions imposed
    hiddenscale::LogForm form;               // normalized, in E1 and E1eps
};

TerribleHiddenScale terrible_hidden_scale(double eps, double a);

} // namespace hsym::bcpert
