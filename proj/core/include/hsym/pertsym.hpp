#pragma once

#include "hsym/exprcore.hpp"
#include "hsym/hiddenscale.hpp"

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace hsym::pertsym {

using exprcore::Expr;

// One tangent direction of the generator. Shapes may use the independent variables,
// the dependent variable and the switch s; each shape gets an unknown weight per order.
struct Direction {
    std::string var;
    bool dependent = false;
    std::vector<Expr> shapes;
};

struct GeneratorAnsatz {
    std::string param = "eps";
    std::string sw = "s";
    std::string dep = "y";
    std::vector<Direction> directions;
    std::map<std::string, Expr> rules;   // derivatives of opaque functions, e.g. U -> U_x (w.r.t. direction vars)
    std::set<std::string> match;         // symbols whose coefficients must vanish; default: all but param
};

// {1, t, s*t, t^2, y, t*y, t^2*y}
std::vector<Expr> default_shapes(const std::string& t, const std::string& y, const std::string& s);

struct Generator {
    std::vector<std::string> vars;                 // direction variables
    std::vector<std::vector<Expr>> comps;          // comps[direction][order]
    std::vector<std::string> free_weights;         // underdetermined weights, set to zero
    std::vector<Expr> residuals;                   // determining equation per order, all zero when solved
    std::string param = "eps";

    const Expr& component(const std::string& var, int order) const;
    Expr total(const std::string& var) const;      // sum_j param^j comps[.][j]
};

// Series with param*s in place of param: orders[j] * (param*s)^j.
Expr switch_series(const std::vector<Expr>& orders, const std::string& param, const std::string& sw);

// Solves X(dep - series)|_{dep = series} = 0 order by order up to k, with X^(0) carrying d/ds.
// Throws std::runtime_error naming the residual when the ansatz admits no solution.
Generator solve_determining(const Expr& series_with_s, const GeneratorAnsatz& ansatz, int k);

// Underdamped oscillator y'' + eps*y' + y = 0: bare series to second order.
std::vector<Expr> underdamped_series();

struct UnderdampedResult {
    Generator generator;
    hsym::hiddenscale::UniformSolution solution;   // A*exp(-eps*t/2)*sin(kappa*t + theta), kappa = exp(-eps^2/8)
};

// Integrates dt/ds = xi_t, dy/ds = eta_y from s = 0 to 1 in closed form. eps, A and theta
// are bound into the evaluator; the symbolic form keeps them as symbols.
UnderdampedResult underdamped_uniform(double eps, double A, double theta);

// Principal branch of Lambert W for z >= -1/e, by Halley iteration.
double lambert_w(double z);
// W(exp(log_z)) without forming exp(log_z).
double lambert_w_log(double log_z);

struct BurgersProfile {
    std::function<double(double)> U;        // initial profile, strictly increasing
    std::function<double(double)> H;        // inverse of U
    std::function<double(double)> P;        // antiderivative of 1/U_x
    std::function<double(double)> dPdx;     // 1/U_x
    double u_min = -1e300;                  // range of U
    double u_max = 1e300;
};

BurgersProfile log_profile();   // U = ln(1 + x), x > -1

// Solves P(x) - P(H(u)) = eps*t*u for u by safeguarded Newton-bisection.
double burgers_ft_solve(const BurgersProfile& p, double t, double x, double eps);

// u = (x+1)^2/(2 eps t) - W(exp((x+1)^2/(eps t))/(eps t))/2 for the log profile.
double burgers_closed_form(double t, double x, double eps);

// Bare first-order series ln(1+x) - eps*t*ln(1+x)/(1+x)^2.
double burgers_bare(double t, double x, double eps);

} // namespace hsym::pertsym
