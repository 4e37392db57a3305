#include "hsym/exprcore/linsolve.hpp"

#include <algorithm>
#include <stdexcept>

namespace hsym::exprcore {

LinearSolution solve_linear(std::vector<std::vector<Expr>> a, std::vector<Expr> b) {
    const size_t rows = a.size();
    if (b.size() != rows) throw std::invalid_argument("solve_linear: row count mismatch");
    const size_t cols = rows ? a[0].size() : 0;
    for (const auto& r : a)
        if (r.size() != cols) throw std::invalid_argument("solve_linear: ragged matrix");

    std::vector<int> order(rows);
    for (size_t i = 0; i < rows; ++i) order[i] = static_cast<int>(i);
    std::vector<int> pivot_col_of_row;
    size_t rank = 0;
    LinearSolution sol;

    for (size_t c = 0; c < cols && rank < rows; ++c) {
        int best = -1;
        bool any = false;
        for (size_t r = rank; r < rows; ++r) {
            const Expr& v = a[r][c];
            if (v.is_zero()) continue;
            any = true;
            if (v.is_number()) {
                best = static_cast<int>(r);
                break;
            }
            if (best < 0 && v.is_single_term()) best = static_cast<int>(r);
        }
        if (!any) continue;
        if (best < 0) throw OutOfClass("solve_linear: pivot in column " + std::to_string(c) + " is not a single term");
        std::swap(a[rank], a[best]);
        std::swap(b[rank], b[best]);
        std::swap(order[rank], order[best]);

        Expr inv = a[rank][c].inverse();
        for (size_t k = c; k < cols; ++k)
            if (!a[rank][k].is_zero()) a[rank][k] = a[rank][k] * inv;
        b[rank] = b[rank] * inv;
        for (size_t r = 0; r < rows; ++r) {
            if (r == rank || a[r][c].is_zero()) continue;
            Expr f = a[r][c];
            for (size_t k = c; k < cols; ++k)
                if (!a[rank][k].is_zero()) a[r][k] -= f * a[rank][k];
            if (!b[rank].is_zero()) b[r] -= f * b[rank];
        }
        pivot_col_of_row.push_back(static_cast<int>(c));
        ++rank;
    }
    for (size_t c = 0; c < cols; ++c)
        if (std::find(pivot_col_of_row.begin(), pivot_col_of_row.end(), static_cast<int>(c)) == pivot_col_of_row.end())
            sol.free_cols.push_back(static_cast<int>(c));

    for (size_t r = rank; r < rows; ++r)
        if (!b[r].is_zero()) sol.inconsistent_rows.push_back(order[r]);

    sol.x.assign(cols, Expr());
    for (size_t r = 0; r < rank; ++r) sol.x[pivot_col_of_row[r]] = b[r];
    for (int f : sol.free_cols) {
        std::vector<Expr> dir(cols);
        dir[f] = Expr(1);
        for (size_t r = 0; r < rank; ++r) dir[pivot_col_of_row[r]] = -a[r][f];
        sol.nullspace.push_back(std::move(dir));
    }
    return sol;
}

} // namespace hsym::exprcore
