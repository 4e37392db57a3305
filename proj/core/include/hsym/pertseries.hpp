#pragma once

#include "hsym/exprcore.hpp"

#include <complex>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace hsym::pertseries {

using exprcore::Expr;
using exprcore::Q;
using exprcore::QI;

// Constant-coefficient linear operator sum_n c[n] d^n/dx^n.
struct LinearOperator {
    std::vector<Q> c;
    std::string var;

    int differential_order() const { return static_cast<int>(c.size()) - 1; }
    Expr apply(const Expr& y) const;
    // Characteristic polynomial and its k-th derivative at z.
    QI char_poly(const QI& z, int k = 0) const;
};

struct Root {
    QI value;
    int multiplicity;
};

// Exact roots of the characteristic polynomial. Throws if a root is not a Gaussian
// rational with denominator at most max_den.
std::vector<Root> characteristic_roots(const LinearOperator& L, long max_den = 10000);

struct Complementary {
    Expr solution;                   // sum of constants times basis functions
    std::vector<Expr> basis;
    std::vector<std::string> constants;
};

// Real basis x^j e^{ax}, x^j e^{ax} cos(bx), x^j e^{ax} sin(bx); ordered by power j,
// then by decreasing real part, cos before sin.
std::vector<Expr> kernel_basis(const LinearOperator& L);
Complementary complementary_function(const LinearOperator& L, const std::vector<std::string>& names);

// Particular solution by undetermined coefficients with resonance handling.
// Throws OutOfClass if the forcing has non-numeric frequencies in the variable.
Expr particular_solution(const LinearOperator& L, const Expr& f);

enum class ConstantsMode { Particular, ZeroICs, Fresh };

struct OrderPolicy {
    ConstantsMode mode = ConstantsMode::ZeroICs;
    std::vector<std::string> names;   // constants for Fresh mode, auto basis
    std::optional<Expr> templ;        // Fresh mode with user-written kernel element
};

// solve_order: particular solution plus the complementary part per policy.
struct OrderSolution {
    Expr y;
    std::vector<std::string> constants;
};
OrderSolution solve_order(const LinearOperator& L, const Expr& f, const OrderPolicy& policy);

struct ODEProblem {
    std::string var = "x";
    std::string dep = "y";
    std::string param = "eps";
    Expr equation;   // left side of equation = 0, in symbols dep, dep', dep'', ...
    int order = 1;
    OrderPolicy zeroth{ConstantsMode::Fresh, {}, std::nullopt};
    std::map<int, OrderPolicy> higher;          // default ZeroICs
    std::set<std::string> drop_in_forcing;      // removed from forcing at orders >= 1
};

std::string derivative_symbol(const std::string& dep, int n);

struct Split {
    LinearOperator L;
    Expr N;   // everything except the eps^0 linear constant-coefficient part
};
Split split_equation(const ODEProblem& p);

struct HierarchyLevel {
    LinearOperator L;
    Expr forcing;
};

// Order-j forcing from lower orders: -[eps^j] N[sum_{i<j} eps^i y_i].
Expr forcing_at(const ODEProblem& p, const Split& s, const std::vector<Expr>& lower, int j);
std::vector<HierarchyLevel> expand_hierarchy(const ODEProblem& p, const std::vector<Expr>& solved);

struct PerturbationSeries {
    std::vector<Expr> orders;
    std::vector<std::pair<std::string, int>> constants;
    std::string param = "eps";
    std::string var = "x";

    Expr sum() const;
    std::vector<std::string> constants_at(int order) const;
};

PerturbationSeries build_bare_series(const ODEProblem& p);

// Orders 0..k of the full equation evaluated on the series (with the same forcing drop
// rule); all entries are zero for a correct series.
std::vector<Expr> residuals(const ODEProblem& p, const PerturbationSeries& s);

} // namespace hsym::pertseries
