#include "common.hpp"

#include "hsym/bcpert.hpp"

#include <cmath>
#include <stdexcept>

namespace hsym::cli::detail {

using exprcore::print;

namespace {

bcpert::SwitchbackProblem problem_of(const ProblemSpec& spec, const Values& params) {
    bcpert::SwitchbackProblem p;
    p.n = spec.integer("method.dimension", 2);
    p.delta = spec.integer("method.delta", 1);
    p.order = spec.integer("method.order", 2);
    p.eps = params.at("eps");
    p.a = params.at("a");
    return p;
}

hiddenscale::LogForm at_a(const hiddenscale::LogForm& f, double a) {
    if (a != 1.0) throw std::invalid_argument("exact asymptotic form is tabulated at a = 1");
    auto s = [](const Expr& e) { return exprcore::substitute(e, "a", Expr(1)); };
    return hiddenscale::LogForm{s(f.c0), s(f.coef), s(f.arg)}.normalized("E1");
}

struct Errors {
    std::vector<double> xs, oracle, series1, series2, asym, hs;
    double err1 = 0, err2 = 0, err_asym = 0, err_hs = 0;
    numlab::BVPSolution bvp;
    bool has_hs = false;
};

// u'' + (n-1)u'/x + u u' + delta u'^2 = 0 in t = ln x
numlab::BVPSolution oracle_bvp(const bcpert::SwitchbackProblem& p, double x_max) {
    const double n = p.n, delta = p.delta;
    numlab::Rhs rhs = [n, delta](double t, const numlab::State& y, numlab::State& d) {
        d[0] = y[1];
        d[1] = -(n - 2.0) * y[1] - std::exp(t) * y[0] * y[1] - delta * y[1] * y[1];
    };
    numlab::ShootingOptions so;
    so.slope0 = 0.1;
    so.slope1 = 0.2;
    return numlab::solve_bvp_shooting(rhs, std::log(p.eps), 1.0 - p.a, std::log(x_max), 1.0, so);
}

Errors switchback_errors(const ProblemSpec& spec, const Values& params) {
    Errors e;
    auto p = problem_of(spec, params);
    auto s = bcpert::switchback_series(p);
    auto md = bcpert::most_divergent_sum(p.eps, p.a);
    e.bvp = oracle_bvp(p, spec.number("bcs.right", 50.0));
    const double ratio = spec.number("validation.ratio", 1.05), x_end = spec.number("validation.x_max", 10.0);
    std::optional<bcpert::TerribleHiddenScale> th;
    if (p.n == 2 && p.delta == 1 && p.a > 0.0 && p.a <= 1.0) th = bcpert::terrible_hidden_scale(p.eps, p.a);
    e.has_hs = th.has_value();
    for (double x = p.eps; x <= x_end * (1 + 1e-12); x *= ratio) {
        e.xs.push_back(x);
        const double u = e.bvp.profile.at(std::log(x), 0);
        e.oracle.push_back(u);
        e.series1.push_back(s(x, std::min(1, p.order)));
        e.series2.push_back(s(x, p.order));
        e.asym.push_back(md(x));
        e.hs.push_back(th ? th->solution(x, {}) : NAN);
        e.err1 = std::max(e.err1, std::abs(e.series1.back() - u));
        e.err2 = std::max(e.err2, std::abs(e.series2.back() - u));
        e.err_asym = std::max(e.err_asym, std::abs(e.asym.back() - u));
        if (th) e.err_hs = std::max(e.err_hs, std::abs(e.hs.back() - u));
    }
    return e;
}

} // namespace

void derive_switchback(const ProblemSpec& spec, RunReport& r) {
    const Values params = parameters(spec);
    auto p = problem_of(spec, params);
    auto s = bcpert::switchback_series(p);
    bool clean = true;
    for (size_t j = 0; j < s.orders.size(); ++j) {
        r.line("bare series", "order " + std::to_string(j) + ": " + print(s.orders[j]));
        clean = clean && bcpert::switchback_residual(s, static_cast<int>(j)).is_zero();
    }
    r.check("bare series residual", clean, "orders 0.." + std::to_string(s.orders.size() - 1) + " vanish");
    for (const auto& [name, v] : s.bc_values) r.line("boundary constants", name + " = " + print(v));

    auto md = bcpert::most_divergent_sum(p.eps, p.a);
    r.line("most divergent sum", "u = " + md.free_form.to_string());
    r.line("most divergent sum", "u = " + md.form.to_string());

    if (p.n != 2 || p.delta != 1) return;
    auto th = bcpert::terrible_hidden_scale(p.eps, p.a);
    const auto u = unknown_set(th.ft);
    for (size_t i = 0; i < th.ft.unknowns.size(); ++i)
        r.line("FT system", hiddenscale::format_equation(th.ft.unknowns[i] + "'", th.ft.rhs[i], u));
    for (size_t i = 0; i < th.flows.flows.size(); ++i) {
        const auto& f = th.flows.flows[i];
        if (f.kind == hiddenscale::FlowKind::Rational)
            r.line("flows", th.flows.unknowns[i] + "(0) = (" + print(f.num) + ")/(" + print(f.den) + ")");
        else if (f.kind == hiddenscale::FlowKind::Log)
            r.line("flows", th.flows.unknowns[i] + "(0) = " + print(f.at_zero) + " + (" + print(f.coef) + ")*ln(" +
                                print(f.arg) + ")");
        else
            r.line("flows", th.flows.unknowns[i] + "(0) = " + print(f.at_zero));
    }
    r.line("uniform solution", "u = " + th.tau_form.log_form->to_string());
    r.line("uniform solution", "u = " + th.form.to_string());
    r.check("hidden scale route equals most divergent sum", th.form == md.form);
    if (p.a == 1.0) {
        auto exact = bcpert::terrible_exact_asymptotic();
        r.line("uniform solution", "exact asymptotic: u = " + exact.to_string());
        r.check("matches exact asymptotic solution at a = 1", at_a(th.form, 1.0) == exact);
    }
}

std::map<std::string, double> metrics_switchback(const ProblemSpec& spec, const Values& overrides) {
    auto e = switchback_errors(spec, parameters(spec, overrides));
    std::map<std::string, double> m{{"series1_sup", e.err1}, {"series2_sup", e.err2}, {"asymptotic_sup", e.err_asym}};
    if (e.has_hs) m["hidden_scale_sup"] = e.err_hs;
    return m;
}

void validate_switchback(const ProblemSpec& spec, const RunOptions&, RunReport& r) {
    derive_switchback(spec, r);
    const Values base = parameters(spec);
    std::vector<double> eps_list = spec.has("sweep.eps") ? spec.numbers("sweep.eps") : std::vector<double>{base.at("eps")};
    std::map<double, Errors> all;
    for (double eps : eps_list) {
        Values params = base;
        params["eps"] = eps;
        auto e = switchback_errors(spec, params);
        const std::string tag = "(eps=" + fmt(eps) + ")";
        r.value("oracle_slope" + tag, e.bvp.slope);
        r.value("series1_sup" + tag, e.err1);
        r.value("series2_sup" + tag, e.err2);
        r.value("asymptotic_sup" + tag, e.err_asym);
        if (e.has_hs) r.value("hidden_scale_sup" + tag, e.err_hs);
        const double left = e.bvp.profile.y.front()[0], right = e.bvp.profile.y.back()[0];
        r.check("oracle boundary conditions" + tag,
                std::abs(left - (1.0 - params.at("a"))) < 1e-9 && std::abs(right - 1.0) < 1e-9,
                "miss " + fmt(e.bvp.miss));
        CsvTable t{spec.name + "_eps" + fmt(eps), {"x", "oracle", "series1", "series2", "asymptotic", "hidden_scale"}, {}};
        for (size_t i = 0; i < e.xs.size(); ++i)
            t.rows.push_back({e.xs[i], e.oracle[i], e.series1[i], e.series2[i], e.asym[i], e.hs[i]});
        r.tables.push_back(std::move(t));
        all.emplace(eps, std::move(e));
    }
    const double small = eps_list.front(), large = eps_list.back();
    const auto& es = all.at(small);
    const auto& el = all.at(large);
    if (spec.has("tol.oracle")) {
        const double tol = spec.number("tol.oracle");
        r.check("asymptotic form vs oracle at eps=" + fmt(small), es.err_asym <= tol,
                fmt(es.err_asym) + " <= " + fmt(tol));
        if (es.has_hs)
            r.check("hidden scale form vs oracle at eps=" + fmt(small), es.err_hs <= tol, fmt(es.err_hs) + " <= " + fmt(tol));
    }
    if (spec.has("tol.series")) {
        const double tol = spec.number("tol.series");
        r.check("second-order series vs oracle at eps=" + fmt(large), el.err2 <= tol, fmt(el.err2) + " <= " + fmt(tol));
    }
    if (eps_list.size() >= 2) {
        r.check("asymptotic form best at eps=" + fmt(small), es.err_asym < es.err2 && es.err_asym < es.err1,
                fmt(es.err_asym) + " < min(" + fmt(es.err1) + ", " + fmt(es.err2) + ")");
        r.check("second-order series best at eps=" + fmt(large), el.err2 < el.err_asym && el.err2 < el.err1,
                fmt(el.err2) + " < min(" + fmt(el.err1) + ", " + fmt(el.err_asym) + ")");
    }
}

} // namespace hsym::cli::detail
