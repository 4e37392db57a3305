#pragma once

#include "hsym/exprcore/expr.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace hsym::exprcore {

// Coefficients of p^0..p^order. Exponents that depend on p are series-expanded; a
// negative power of p anywhere is an error.
std::vector<Expr> expand_in(const Expr& e, const std::string& p, int order);

// Coefficient of p^j after expansion to truncation order `trunc`; j > trunc throws.
Expr collect_order(const Expr& e, const std::string& p, int j, int trunc);
Expr collect_order(const Expr& e, const std::string& p, int j);

// Sum of p^j * collect_order(e, p, j) for j <= order.
Expr truncate(const Expr& e, const std::string& p, int order);

// Highest power of p present after expansion (exponents must be p-free).
int max_power(const Expr& e, const std::string& p);

// Basis function key: monomial in the basis symbols plus the parts of rate and phase
// that involve them.
struct BasisKey {
    Monomial m;
    Poly rate;
    Poly phase;
    friend bool operator<(const BasisKey& a, const BasisKey& b);
};

std::string to_string(const BasisKey& k);
Expr basis_expr(const BasisKey& k);

// Decompose e = sum_k coeff_k * basis_k where coefficients are free of the basis symbols.
std::map<BasisKey, Expr> split_basis(const Expr& e, const std::set<std::string>& basis_syms);

} // namespace hsym::exprcore
