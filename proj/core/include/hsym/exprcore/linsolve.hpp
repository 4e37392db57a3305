#pragma once

#include "hsym/exprcore/expr.hpp"

#include <vector>

namespace hsym::exprcore {

struct LinearSolution {
    std::vector<Expr> x;                    // particular solution, free unknowns set to zero
    std::vector<int> free_cols;
    std::vector<std::vector<Expr>> nullspace; // one direction per free column
    std::vector<int> inconsistent_rows;     // original row indices with 0 = nonzero
    bool consistent() const { return inconsistent_rows.empty(); }
    bool unique() const { return free_cols.empty() && consistent(); }
};

// Gauss-Jordan over the expression ring. Pivots must be single terms; a column whose
// nonzero entries are all sums throws OutOfClass.
LinearSolution solve_linear(std::vector<std::vector<Expr>> a, std::vector<Expr> b);

} // namespace hsym::exprcore
