#include "hsym/pertsym.hpp"

#include "hsym/pertseries.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hsym::pertsym {

using exprcore::parse;
using exprcore::Term;

std::vector<Expr> default_shapes(const std::string& t, const std::string& y, const std::string& s) {
    const Expr T = Expr::sym(t), Y = Expr::sym(y), S = Expr::sym(s);
    return {Expr(1), T, S * T, T * T, Y, T * Y, T * T * Y};
}

const Expr& Generator::component(const std::string& var, int order) const {
    for (size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == var) return comps[i].at(order);
    throw std::out_of_range("no generator direction " + var);
}

Expr Generator::total(const std::string& var) const {
    for (size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == var) {
            Expr r;
            for (size_t j = 0; j < comps[i].size(); ++j) r += Expr::sym(param).pow(static_cast<int>(j)) * comps[i][j];
            return r;
        }
    throw std::out_of_range("no generator direction " + var);
}

Expr switch_series(const std::vector<Expr>& orders, const std::string& param, const std::string& sw) {
    Expr r;
    const Expr es = Expr::sym(param) * Expr::sym(sw);
    for (size_t j = 0; j < orders.size(); ++j) r += es.pow(static_cast<int>(j)) * orders[j];
    return r;
}

namespace {

std::string weight_name(const std::string& var, int order, const Expr& shape) {
    return var + "(" + std::to_string(order) + ")[" + exprcore::print(shape) + "]";
}

} // namespace

Generator solve_determining(const Expr& Y, const GeneratorAnsatz& an, int k) {
    Generator g;
    g.param = an.param;
    const size_t nd = an.directions.size();
    for (const auto& d : an.directions) g.vars.push_back(d.var);
    g.comps.assign(nd, {});

    std::set<std::string> match = an.match;
    if (match.empty()) {
        match = Y.symbols();
        for (const auto& d : an.directions)
            for (const auto& s : d.shapes)
                for (const auto& v : s.symbols()) match.insert(v);
        match.erase(an.param);
        match.erase(an.dep);
    }

    std::vector<Expr> dY(nd);
    for (size_t i = 0; i < nd; ++i)
        if (!an.directions[i].dependent) dY[i] = exprcore::diff(Y, exprcore::DiffContext{an.directions[i].var, an.rules, {}});
    const Expr dYs = exprcore::diff(Y, an.sw);

    // contribution of component phi in direction i to X(dep - Y)|_{dep=Y}
    auto action = [&](size_t i, const Expr& phi) {
        Expr at = exprcore::substitute(phi, an.dep, Y);
        return an.directions[i].dependent ? at : -(at * dY[i]);
    };

    for (int m = 0; m <= k; ++m) {
        Expr known = -exprcore::collect_order(dYs, an.param, m);
        for (size_t i = 0; i < nd; ++i)
            for (int j = 0; j < m; ++j)
                if (!g.comps[i][j].is_zero()) known += exprcore::collect_order(action(i, g.comps[i][j]), an.param, m - j);

        std::vector<Expr> cols;
        std::vector<std::pair<size_t, size_t>> where;
        for (size_t i = 0; i < nd; ++i)
            for (size_t b = 0; b < an.directions[i].shapes.size(); ++b) {
                cols.push_back(exprcore::collect_order(action(i, an.directions[i].shapes[b]), an.param, 0));
                where.emplace_back(i, b);
            }
        std::vector<std::map<exprcore::BasisKey, Expr>> split_cols;
        std::set<exprcore::BasisKey> keys;
        for (const auto& c : cols) {
            split_cols.push_back(exprcore::split_basis(c, match));
            for (const auto& [key, v] : split_cols.back()) keys.insert(key);
        }
        auto split_known = exprcore::split_basis(known, match);
        for (const auto& [key, v] : split_known) keys.insert(key);

        std::vector<std::vector<Expr>> a;
        std::vector<Expr> b;
        for (const auto& key : keys) {
            std::vector<Expr> row(cols.size());
            for (size_t c = 0; c < cols.size(); ++c) {
                auto it = split_cols[c].find(key);
                if (it != split_cols[c].end()) row[c] = it->second;
            }
            auto it = split_known.find(key);
            a.push_back(std::move(row));
            b.push_back(it == split_known.end() ? Expr() : -it->second);
        }
        auto sol = exprcore::solve_linear(a, b);
        if (!sol.consistent()) {
            std::ostringstream msg;
            msg << "no perturbation symmetry in the ansatz span at order " << m << "; residual " << exprcore::print(known);
            throw std::runtime_error(msg.str());
        }
        for (int fc : sol.free_cols) {
            auto [i, bb] = where[fc];
            g.free_weights.push_back(weight_name(an.directions[i].var, m, an.directions[i].shapes[bb]));
        }
        for (size_t i = 0; i < nd; ++i) g.comps[i].push_back(Expr());
        for (size_t c = 0; c < cols.size(); ++c) {
            auto [i, bb] = where[c];
            g.comps[i][m] += sol.x[c] * an.directions[i].shapes[bb];
        }
    }

    Expr full = -dYs;
    for (size_t i = 0; i < nd; ++i) full += action(i, g.total(an.directions[i].var));
    for (int m = 0; m <= k; ++m) g.residuals.push_back(exprcore::collect_order(full, an.param, m));
    return g;
}

std::vector<Expr> underdamped_series() {
    pertseries::ODEProblem p;
    p.var = "t";
    p.dep = "y";
    p.param = "eps";
    p.equation = parse("y'' + eps*y' + y");
    p.order = 2;
    p.zeroth = {pertseries::ConstantsMode::Fresh, {"A", "theta"}, parse("A*sin(t + theta)")};
    p.higher[1] = {pertseries::ConstantsMode::Particular, {}, std::nullopt};
    p.higher[2] = {pertseries::ConstantsMode::Particular, {}, std::nullopt};
    return pertseries::build_bare_series(p).orders;
}

namespace {

// e == c*v with v to the first power in every term
Expr divide_linear(const Expr& e, const std::string& v) {
    std::vector<Term> out;
    for (const auto& t : e.terms()) {
        if (exprcore::mono_exp(t.m, v) != 1 || t.rate.contains(v) || t.phase.contains(v))
            throw exprcore::OutOfClass("FT component is not linear in " + v);
        Term c = t;
        c.m = exprcore::mono_with(t.m, v, 0);
        out.push_back(std::move(c));
    }
    return Expr::from_terms(std::move(out));
}

} // namespace

UnderdampedResult underdamped_uniform(double eps, double A, double theta) {
    UnderdampedResult r;
    const int k = 2;
    auto orders = underdamped_series();
    Expr Y = switch_series(orders, "eps", "s");
    GeneratorAnsatz an;
    an.directions = {{"t", false, default_shapes("t", "y", "s")}, {"y", true, default_shapes("t", "y", "s")}};
    r.generator = solve_determining(Y, an, k);

    // dt/ds = c(s) t  ->  t = t~ exp(C(s))
    Expr c = divide_linear(r.generator.total("t"), "t");
    Expr C = hiddenscale::antiderivative(c, "s");
    if (!C.as_poly()) throw exprcore::OutOfClass("t-flow is not a polynomial exponent");
    // dy/ds = g y with t eliminated, truncated at order k
    Expr gy = divide_linear(r.generator.total("y"), "y");
    Expr stretch = exprcore::truncate(exprcore::exp(C), "eps", k);
    Expr g = exprcore::truncate(exprcore::substitute(gy, "t", Expr::sym("tt") * stretch), "eps", k);
    Expr G = hiddenscale::antiderivative(g, "s");
    if (!G.as_poly()) throw exprcore::OutOfClass("y-flow is not a polynomial exponent");

    // s = 1; the amplitude is written in t (difference O(eps^3 t)), the phase keeps t~ = kappa*t
    Expr amp = exprcore::exp(exprcore::substitute(G, {{"s", Expr(1)}, {"tt", Expr::sym("t")}}));
    Expr special = exprcore::substitute(orders[0], "t", Expr::sym("kappa") * Expr::sym("t"));
    Expr C1 = exprcore::substitute(C, "s", Expr(1));

    auto& us = r.solution;
    us.symbolic = amp * special;
    us.special = orders[0];
    us.var = "t";
    us.provenance = "special: " + exprcore::print(orders[0]) + "; t = t~*exp(" + exprcore::print(C) +
                    "), y = y~*exp(" + exprcore::print(G) + ")";
    us.binder = [eps, A, theta, C1](double, std::map<std::string, double>& v) {
        v["eps"] = eps;
        v["A"] = A;
        v["theta"] = theta;
        v["kappa"] = std::exp(-exprcore::evaluate_real(C1, v));
    };
    return r;
}

// ---------------------------------------------------------------- Lambert W

double lambert_w(double z) {
    const double em1 = 0.36787944117144232160;  // 1/e
    if (std::isnan(z)) throw std::domain_error("lambert_w: NaN argument");
    if (z < -em1) {
        if (-em1 - z < 4 * std::numeric_limits<double>::epsilon()) return -1.0;
        throw std::domain_error("lambert_w: argument below -1/e");
    }
    if (z == 0.0) return 0.0;
    if (std::isinf(z)) return z;
    double w;
    if (z < -0.32) {
        double p = std::sqrt(2.0 * (std::exp(1.0) * z + 1.0));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else if (z < 3.0) {
        w = std::log1p(z);
    } else {
        double l1 = std::log(z), l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }
    for (int it = 0; it < 100; ++it) {
        double ew = std::exp(w);
        double f = w * ew - z;
        double wp1 = w + 1.0;
        if (f == 0.0 || wp1 == 0.0) break;
        double dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= dw;
        if (std::abs(dw) <= 1e-16 * (1.0 + std::abs(w))) break;
    }
    return w;
}

double lambert_w_log(double L) {
    if (L <= 1.0) return lambert_w(std::exp(L));
    // w + ln w = L
    double w = L - std::log(L);
    for (int it = 0; it < 100; ++it) {
        double f = w + std::log(w) - L;
        double f1 = 1.0 + 1.0 / w;
        double f2 = -1.0 / (w * w);
        double dw = f / (f1 - 0.5 * f * f2 / f1);
        w -= dw;
        if (std::abs(dw) <= 1e-16 * w) break;
    }
    return w;
}

// ---------------------------------------------------------------- Burgers

BurgersProfile log_profile() {
    BurgersProfile p;
    p.U = [](double x) { return std::log1p(x); };
    p.H = [](double u) { return std::expm1(u); };
    p.P = [](double x) { return 0.5 * x * x + x; };
    p.dPdx = [](double x) { return 1.0 + x; };
    return p;
}

double burgers_ft_solve(const BurgersProfile& p, double t, double x, double eps) {
    const double et = eps * t;
    const double u0 = p.U(x);
    if (et == 0.0) return u0;
    const double Px = p.P(x);
    auto g = [&](double u) { return Px - p.P(p.H(u)) - et * u; };
    auto dg = [&](double u) {
        double h = p.dPdx(p.H(u));
        return -h * h - et;
    };
    // g is decreasing in u
    double lo = u0, hi = u0;
    double g0 = g(u0);
    if (g0 == 0.0) return u0;
    double step = std::max(1.0, std::abs(u0));
    if (g0 < 0.0) {
        for (int i = 0; g(lo) < 0.0; ++i) {
            if (i > 200 || lo - step < p.u_min) throw std::runtime_error("burgers_ft_solve: root outside the range of U");
            lo -= step;
            step *= 2.0;
        }
    } else {
        for (int i = 0; g(hi) > 0.0; ++i) {
            if (i > 200 || hi + step > p.u_max) throw std::runtime_error("burgers_ft_solve: root outside the range of U");
            hi += step;
            step *= 2.0;
        }
    }
    double u = 0.5 * (lo + hi);
    double dx_old = hi - lo, dx = dx_old;
    for (int it = 0; it < 200; ++it) {
        double f = g(u), df = dg(u);
        if (f == 0.0) return u;
        if (f > 0.0) lo = u;
        else hi = u;
        double newton = u - f / df;
        if (newton <= lo || newton >= hi || std::abs(2.0 * f) > std::abs(dx_old * df)) {
            dx_old = dx;
            dx = 0.5 * (hi - lo);
            u = lo + dx;
        } else {
            dx_old = dx;
            dx = f / df;
            u = newton;
        }
        if (std::abs(dx) <= 1e-15 * (1.0 + std::abs(u)) || hi - lo <= 1e-15 * (1.0 + std::abs(u))) return u;
    }
    throw std::runtime_error("burgers_ft_solve: root finding did not converge");
}

double burgers_closed_form(double t, double x, double eps) {
    const double et = eps * t;
    if (et == 0.0) return std::log1p(x);
    const double L = (x + 1.0) * (x + 1.0) / et - std::log(et);
    const double W = lambert_w_log(L);
    // (x+1)^2/(2 eps t) - W/2 rewritten with W + ln W = L to avoid cancellation
    return 0.5 * (std::log(W) + std::log(et));
}

double burgers_bare(double t, double x, double eps) {
    const double U = std::log1p(x);
    return U - eps * t * U / ((1.0 + x) * (1.0 + x));
}

} // namespace hsym::pertsym
