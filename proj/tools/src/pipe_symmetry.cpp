#include "common.hpp"

#include "hsym/pertsym.hpp"

#include <cmath>
#include <stdexcept>

namespace hsym::cli::detail {

using exprcore::parse;
using exprcore::print;

namespace {

bool is_underdamped(const ProblemSpec& spec) {
    return spec.var == "t" && spec.dep == "y" && spec.expr("equation.lhs") == parse("y'' + eps*y' + y");
}

struct SymRun {
    pertseries::PerturbationSeries bare;
    std::vector<Expr> residuals;
    pertsym::Generator gen;
};

SymRun symmetry_run(const ProblemSpec& spec) {
    SymRun s;
    auto p = ode_problem(spec);
    s.bare = pertseries::build_bare_series(p);
    s.residuals = pertseries::residuals(p, s.bare);
    const Expr Y = pertsym::switch_series(s.bare.orders, spec.param, spec.str("ansatz.switch", "s"));
    s.gen = pertsym::solve_determining(Y, ansatz_of(spec), p.order);
    return s;
}

double closed_form_error(const ProblemSpec& spec, const Values& params) {
    const double eps = params.at("eps"), A = params.at("A"), theta = params.at("theta");
    auto res = pertsym::underdamped_uniform(eps, A, theta);
    const auto xs = spec.grid("validation.grid");
    std::vector<double> approx;
    for (double t : xs) approx.push_back(res.solution(t, {}));
    // oracle from the closed form's own initial state
    Values v;
    res.solution.binder(0.0, v);
    const Expr dy = exprcore::diff(*res.solution.symbolic, "t");
    v["t"] = 0.0;
    std::vector<double> y0{exprcore::evaluate_real(*res.solution.symbolic, v), exprcore::evaluate_real(dy, v)};
    auto oracle = oracle_for(spec);
    auto ref = oracle_curve(*oracle, params, y0, 0.0, xs, spec.number("validation.step", 1e-3));
    return sup_error(ref, approx);
}

} // namespace

void derive_symmetry(const ProblemSpec& spec, RunReport& r) {
    auto s = symmetry_run(spec);
    for (size_t j = 0; j < s.bare.orders.size(); ++j)
        r.line("bare series", "order " + std::to_string(j) + ": " + print(s.bare.orders[j]));
    bool clean = true;
    for (const auto& e : s.residuals) clean = clean && e.is_zero();
    r.check("bare series residual", clean, "orders 0.." + std::to_string(s.residuals.size() - 1) + " vanish");

    const auto& g = s.gen;
    for (size_t i = 0; i < g.vars.size(); ++i)
        for (size_t m = 0; m < g.comps[i].size(); ++m)
            r.line("generator", g.vars[i] + "^(" + std::to_string(m) + ") = " + print(g.comps[i][m]));
    for (const auto& w : g.free_weights) r.line("generator", "free weight set to 0: " + w);
    bool solved = true;
    for (const auto& e : g.residuals) solved = solved && e.is_zero();
    r.check("determining equations", solved, "orders 0.." + std::to_string(g.residuals.size() - 1) + " vanish");

    if (is_underdamped(spec)) {
        const Values p = parameters(spec);
        auto res = pertsym::underdamped_uniform(p.at("eps"), p.at("A"), p.at("theta"));
        r.line("uniform solution", spec.dep + " = " + print(*res.solution.symbolic));
        r.line("uniform solution", "kappa = exp(-eps^2/8)");
        r.line("uniform solution", res.solution.provenance);
    }
}

std::map<std::string, double> metrics_symmetry(const ProblemSpec& spec, const Values& overrides) {
    if (!is_underdamped(spec)) throw std::runtime_error("no closed form for this equation");
    return {{"closed_form_sup", closed_form_error(spec, parameters(spec, overrides))}};
}

void validate_symmetry(const ProblemSpec& spec, const RunOptions&, RunReport& r) {
    derive_symmetry(spec, r);
    const bool known = is_underdamped(spec) && oracle_for(spec).has_value();
    if (!r.check("independent oracle", known, known ? "hand-written right-hand side" : "none for this equation")) return;
    const Values base = parameters(spec);
    std::vector<double> eps_list = spec.has("sweep.eps") ? spec.numbers("sweep.eps") : std::vector<double>{base.at("eps")};
    std::vector<std::pair<double, double>> errs;
    CsvTable sc{spec.name + "_scaling", {"eps", "closed_form_sup"}, {}};
    for (double e : eps_list) {
        Values p = base;
        p["eps"] = e;
        double err = closed_form_error(spec, p);
        errs.emplace_back(e, err);
        sc.rows.push_back({e, err});
        r.value("closed_form_sup(eps=" + fmt_fixed(e, 3) + ")", err);
    }
    r.tables.push_back(std::move(sc));

    {
        auto res = pertsym::underdamped_uniform(base.at("eps"), base.at("A"), base.at("theta"));
        const auto xs = spec.grid("validation.grid");
        CsvTable t{spec.name + "_solution", {"t", "closed_form"}, {}};
        for (double x : xs) t.rows.push_back({x, res.solution(x, {})});
        r.tables.push_back(std::move(t));
    }
    if (spec.has("tol.ratio_min") && errs.size() >= 2) {
        // error ratio between the two largest eps, which differ by a factor 2
        const auto& a = errs[errs.size() - 2];
        const auto& b = errs.back();
        const double ratio = b.second / a.second;
        const double lo = spec.number("tol.ratio_min"), hi = spec.number("tol.ratio_max", 1e9);
        r.value("error_ratio", ratio);
        r.check("error ratio eps=" + fmt_fixed(b.first, 2) + " vs " + fmt_fixed(a.first, 2), ratio >= lo && ratio <= hi,
                fmt_fixed(ratio, 3) + " in [" + fmt_fixed(lo, 1) + ", " + fmt_fixed(hi, 1) + "]");
    }
    if (errs.size() >= 3 && spec.has("tol.order_min")) {
        const double p = numlab::convergence_order(errs);
        const double lo = spec.number("tol.order_min"), hi = spec.number("tol.order_max", 1e9);
        r.value("convergence_order", p);
        r.check("convergence order", p >= lo && p <= hi,
                "p = " + fmt_fixed(p, 3) + " in [" + fmt_fixed(lo, 2) + ", " + fmt_fixed(hi, 2) + "]");
    }
}

} // namespace hsym::cli::detail
