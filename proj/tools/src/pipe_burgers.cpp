#include "common.hpp"

#include "hsym/pertsym.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace hsym::cli::detail {

using exprcore::parse;
using exprcore::print;

namespace {

void require_log_profile(const ProblemSpec& spec) {
    const std::string p = spec.str("method.profile", "log");
    if (p != "log") spec.fail("method.profile", "unknown initial profile '" + p + "' (log)");
}

// order-1 term -t*N[U] from the eps part of the equation, with u -> U at t = 0
std::vector<Expr> bare_orders(const ProblemSpec& spec) {
    const Expr lhs = spec.expr("equation.lhs");
    Expr n1 = exprcore::collect_order(lhs, spec.param, 1);
    n1 = exprcore::substitute(n1, {{spec.dep, Expr::sym("U")}, {spec.dep + "_x", Expr::sym("U_x")}});
    if (n1.depends_on(spec.dep + "_t") || !exprcore::collect_order(lhs, spec.param, 0).depends_on(spec.dep + "_t"))
        spec.fail("equation.lhs", "expected u_t + eps*N[u] with N free of u_t");
    return {Expr::sym("U"), -(Expr::sym(spec.var) * n1)};
}

struct BurgersCurves {
    numlab::BurgersField field;
    std::vector<std::vector<double>> bare, sym;
    std::vector<double> sym_sup, bare_sup;
};

BurgersCurves burgers_curves(const ProblemSpec& spec, double eps) {
    BurgersCurves c;
    numlab::BurgersOptions bo;
    bo.x_min = 0.0;
    bo.x_max = spec.number("validation.x_max", 5.0);
    bo.cells = spec.integer("validation.cells", 200);
    const auto times = spec.numbers("validation.times");
    c.field = numlab::solve_burgers_mol([](double x) { return std::log1p(x); }, eps, times, bo);
    for (size_t k = 0; k < times.size(); ++k) {
        std::vector<double> b, s;
        double es = 0, eb = 0;
        for (size_t i = 0; i < c.field.x.size(); ++i) {
            const double x = c.field.x[i], u = c.field.u[k][i];
            b.push_back(pertsym::burgers_bare(times[k], x, eps));
            s.push_back(pertsym::burgers_closed_form(times[k], x, eps));
            eb = std::max(eb, std::abs(b.back() - u));
            es = std::max(es, std::abs(s.back() - u));
        }
        c.bare.push_back(std::move(b));
        c.sym.push_back(std::move(s));
        c.bare_sup.push_back(eb);
        c.sym_sup.push_back(es);
    }
    return c;
}

} // namespace

void derive_burgers(const ProblemSpec& spec, RunReport& r) {
    require_log_profile(spec);
    auto orders = bare_orders(spec);
    for (size_t j = 0; j < orders.size(); ++j) r.line("bare series", "order " + std::to_string(j) + ": " + print(orders[j]));

    const auto an = ansatz_of(spec);
    auto g = pertsym::solve_determining(pertsym::switch_series(orders, spec.param, an.sw), an, 1);
    for (size_t i = 0; i < g.vars.size(); ++i)
        for (size_t m = 0; m < g.comps[i].size(); ++m)
            r.line("generator", g.vars[i] + "^(" + std::to_string(m) + ") = " + print(g.comps[i][m]));
    for (const auto& w : g.free_weights) r.line("generator", "free weight set to 0: " + w);
    bool solved = true;
    for (const auto& e : g.residuals) solved = solved && e.is_zero();
    r.check("determining equations", solved, "orders 0.." + std::to_string(g.residuals.size() - 1) + " vanish");

    r.line("finite transformation", "U = ln(1+x), H(u) = exp(u)-1, P(x) = x^2/2+x");
    r.line("finite transformation", "P(x) - P(H(u)) = eps*t*u");
    r.line("uniform solution", "u = (x+1)^2/(2*eps*t) - W(exp((x+1)^2/(eps*t))/(eps*t))/2");
}

std::map<std::string, double> metrics_burgers(const ProblemSpec& spec, const Values& overrides) {
    require_log_profile(spec);
    const Values p = parameters(spec, overrides);
    auto c = burgers_curves(spec, p.at("eps"));
    const auto times = spec.numbers("validation.times");
    std::map<std::string, double> m;
    for (size_t k = 0; k < times.size(); ++k) {
        m["symmetry_sup(t=" + fmt_fixed(times[k], 1) + ")"] = c.sym_sup[k];
        m["bare_sup(t=" + fmt_fixed(times[k], 1) + ")"] = c.bare_sup[k];
    }
    return m;
}

void validate_burgers(const ProblemSpec& spec, const RunOptions& opts, RunReport& r) {
    derive_burgers(spec, r);
    const Values p = parameters(spec);
    const double eps = p.at("eps");
    const double x_max = spec.number("validation.x_max", 5.0);
    const auto times = spec.numbers("validation.times");

    // closed form against the implicit relation at random points
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> ut(0.05, times.empty() ? 20.0 : times.back()), ux(0.0, x_max);
    const int points = spec.integer("validation.points", 100);
    const auto prof = pertsym::log_profile();
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double t = ut(rng), x = ux(rng);
        worst = std::max(worst, std::abs(pertsym::burgers_ft_solve(prof, t, x, eps) - pertsym::burgers_closed_form(t, x, eps)));
    }
    r.value("closed_form_vs_root_finder", worst);
    const double cf_tol = spec.number("tol.closed_form", 1e-10);
    r.check("closed form vs root finder at " + std::to_string(points) + " random points", worst <= cf_tol,
            fmt(worst) + " <= " + fmt(cf_tol));
    double t0 = 0.0;
    for (double x = 0.0; x <= x_max; x += 0.25) t0 = std::max(t0, std::abs(pertsym::burgers_ft_solve(prof, 0.0, x, eps) - std::log1p(x)));
    r.check("identity at t = 0", t0 == 0.0, "max deviation " + fmt(t0));

    BurgersCurves c;
    try {
        c = burgers_curves(spec, eps);
    } catch (const std::exception& e) {
        r.check("method-of-lines oracle", false, e.what());
        return;
    }
    r.value("oracle_cells", static_cast<double>(c.field.cells));
    r.value("oracle_richardson_diff", c.field.richardson_diff);
    const double tol = spec.number("tol.sup_error", 5e-2);
    for (size_t k = 0; k < times.size(); ++k) {
        const std::string tag = "(t=" + fmt_fixed(times[k], 1) + ")";
        r.value("symmetry_sup" + tag, c.sym_sup[k]);
        r.value("bare_sup" + tag, c.bare_sup[k]);
        r.check("symmetry solution vs oracle " + tag, c.sym_sup[k] <= tol, fmt(c.sym_sup[k]) + " <= " + fmt(tol));
        CsvTable t{spec.name + "_t" + fmt_fixed(times[k], 0), {"x", "u_numeric", "u_bare", "u_symmetry"}, {}};
        for (size_t i = 0; i < c.field.x.size(); ++i)
            t.rows.push_back({c.field.x[i], c.field.u[k][i], c.bare[k][i], c.sym[k][i]});
        r.tables.push_back(std::move(t));
    }
    if (spec.has("tol.bare_ratio") && !times.empty()) {
        const double need = spec.number("tol.bare_ratio");
        const double ratio = c.bare_sup.back() / c.sym_sup.back();
        r.value("bare_ratio(t=" + fmt_fixed(times.back(), 1) + ")", ratio);
        r.check("bare series error exceeds symmetry error at t=" + fmt_fixed(times.back(), 1), ratio >= need,
                fmt_fixed(ratio, 2) + " >= " + fmt_fixed(need, 1));
    }
}

} // namespace hsym::cli::detail
