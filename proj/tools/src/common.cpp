#include "common.hpp"

#include "hsym/pertsym.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hsym::cli::detail {

using exprcore::parse;
using exprcore::print;

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
    return out;
}

Values parameters(const ProblemSpec& spec, const Values& overrides) {
    Values v = spec.parameter_values();
    for (const auto& [k, x] : overrides) v[k] = x;
    return v;
}

namespace {

pertseries::ConstantsMode mode_of(const ProblemSpec& spec, const std::string& key) {
    const std::string m = spec.str(key, "zero_ics");
    if (m == "particular") return pertseries::ConstantsMode::Particular;
    if (m == "zero_ics") return pertseries::ConstantsMode::ZeroICs;
    if (m == "fresh") return pertseries::ConstantsMode::Fresh;
    spec.fail(key, "unknown constants mode '" + m + "' (particular, zero_ics, fresh)");
}

} // namespace

pertseries::ODEProblem ode_problem(const ProblemSpec& spec, int order) {
    pertseries::ODEProblem p;
    p.var = spec.var;
    p.dep = spec.dep;
    p.param = spec.param;
    p.equation = spec.expr("equation.lhs");
    p.order = order < 0 ? spec.integer("method.order", 1) : order;
    p.zeroth.mode = pertseries::ConstantsMode::Fresh;
    p.zeroth.names = spec.list("method.zeroth_names");
    if (spec.has("method.zeroth_template")) p.zeroth.templ = spec.expr("method.zeroth_template");
    for (int j = 1; j <= p.order; ++j) {
        const std::string sec = "order" + std::to_string(j);
        if (!spec.has(sec + ".mode") && !spec.has(sec + ".names") && !spec.has(sec + ".template")) continue;
        pertseries::OrderPolicy pol;
        pol.mode = mode_of(spec, sec + ".mode");
        pol.names = spec.list(sec + ".names");
        if (spec.has(sec + ".template")) pol.templ = spec.expr(sec + ".template");
        p.higher[j] = pol;
    }
    for (const auto& s : spec.list("method.drop_in_forcing")) p.drop_in_forcing.insert(s);
    return p;
}

HiddenScaleRun hidden_scale(const ProblemSpec& spec, int order) {
    HiddenScaleRun run;
    run.problem = ode_problem(spec, order);
    run.bare = pertseries::build_bare_series(run.problem);
    run.residuals = pertseries::residuals(run.problem, run.bare);

    pertseries::PerturbationSeries s = run.bare;
    if (spec.flag("method.most_divergent", false)) {
        auto f = hiddenscale::most_divergent_filter(run.bare);
        s = f.series;
        run.asymptotic_only = f.asymptotic_only;
    }
    const std::string paint_mode = spec.str("method.paint", "polynomial");
    if (paint_mode != "polynomial")
        spec.fail("method.paint", "painting mode '" + paint_mode + "' needs a caller predicate; only 'polynomial' is available from a spec file");
    run.painted = hiddenscale::paint(s, spec.integer("method.n_derivs", 1));

    hiddenscale::FTOptions fo;
    fo.reference_order = spec.integer("method.reference_order", 0);
    fo.unknowns = spec.list("method.unknowns");
    fo.order_assumptions = spec.rationals("method.order_assumptions");
    run.ft = hiddenscale::derive_ft_system(run.painted, run.problem.order, fo);

    hiddenscale::OrbitOptions oo;
    oo.frozen_coefficients = spec.flag("method.frozen", false);
    run.flows = hiddenscale::integrate_orbits(run.ft, spec.var, oo);
    run.uniform = hiddenscale::assemble_uniform(run.painted, run.flows);
    run.uniform.asymptotic_only = run.uniform.asymptotic_only || run.asymptotic_only;
    return run;
}

std::set<std::string> unknown_set(const hiddenscale::FTSystem& ft) {
    return {ft.unknowns.begin(), ft.unknowns.end()};
}

void report_hidden_scale(const HiddenScaleRun& run, RunReport& r) {
    for (size_t j = 0; j < run.bare.orders.size(); ++j)
        r.line("bare series", "order " + std::to_string(j) + ": " + print(run.bare.orders[j]));
    bool clean = true;
    for (const auto& e : run.residuals) clean = clean && e.is_zero();
    r.check("bare series residual", clean, "orders 0.." + std::to_string(run.residuals.size() - 1) + " vanish");

    for (size_t j = 0; j < run.painted.series.orders.size(); ++j)
        r.line("painted series", "order " + std::to_string(j) + ": " + print(run.painted.series.orders[j]));
    if (run.asymptotic_only) r.line("painted series", "most-divergent truncation: asymptotic only");

    const auto u = unknown_set(run.ft);
    for (size_t i = 0; i < run.ft.unknowns.size(); ++i)
        r.line("FT system", hiddenscale::format_equation(run.ft.unknowns[i] + "'", run.ft.rhs[i], u));
    std::string rows;
    for (int n : run.ft.rows_used) rows += (rows.empty() ? "" : ",") + std::to_string(n);
    r.line("FT system", "derivative rows used: " + rows);

    const auto& fl = run.flows;
    for (size_t i = 0; i < fl.flows.size(); ++i) {
        const auto& f = fl.flows[i];
        const std::string lhs = fl.unknowns[i] + "(0) = ";
        switch (f.kind) {
        case hiddenscale::FlowKind::Closed: r.line("flows", lhs + print(f.at_zero)); break;
        case hiddenscale::FlowKind::Rational:
            r.line("flows", lhs + "(" + print(f.num) + ")/(" + print(f.den) + ")");
            break;
        case hiddenscale::FlowKind::Log:
            r.line("flows", lhs + print(f.at_zero) + " + (" + print(f.coef) + ")*ln(" + print(f.arg) + ")");
            break;
        case hiddenscale::FlowKind::Numeric:
            r.line("flows", lhs + "numeric, RK45 from mu = " + fl.x + " to 0 starting at " + fl.tildes[i]);
            break;
        }
    }
    const auto& us = run.uniform;
    if (us.symbolic) r.line("uniform solution", run.problem.dep + " = " + print(*us.symbolic));
    else if (us.log_form) r.line("uniform solution", run.problem.dep + " = " + us.log_form->to_string());
    else r.line("uniform solution", run.problem.dep + " = " + print(us.special) + " with constants along the flows");
    if (us.asymptotic_only) r.line("uniform solution", "asymptotic only");
}

pertsym::GeneratorAnsatz ansatz_of(const ProblemSpec& spec) {
    pertsym::GeneratorAnsatz an;
    an.param = spec.param;
    an.dep = spec.dep;
    an.sw = spec.str("ansatz.switch", "s");
    const auto dirs = spec.list("ansatz.directions");
    if (dirs.empty()) spec.fail("ansatz.directions", "ansatz.directions is required");
    const auto dependent = spec.list("ansatz.dependent");
    std::vector<Expr> shapes;
    if (spec.has("ansatz.shapes")) {
        for (const auto& s : spec.list("ansatz.shapes")) shapes.push_back(parse(s));
    } else {
        shapes = pertsym::default_shapes(spec.var, spec.dep, an.sw);
    }
    for (const auto& d : dirs) {
        bool dep = std::find(dependent.begin(), dependent.end(), d) != dependent.end();
        an.directions.push_back({d, dep, shapes});
    }
    for (const auto& m : spec.list("ansatz.match")) an.match.insert(m);
    for (const auto& rule : spec.list("ansatz.rules")) {
        auto colon = rule.find(':');
        an.rules[rule.substr(0, colon)] = parse(rule.substr(colon + 1));
    }
    return an;
}

FitResult newton_fit(const std::function<std::vector<double>(const std::vector<double>&)>& residual,
                     std::vector<double> x, double tol, int max_iter) {
    FitResult out;
    const size_t n = x.size();
    std::vector<double> f = residual(x);
    auto norm = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double e : v) s = std::max(s, std::abs(e));
        return s;
    };
    for (int it = 0; it < max_iter; ++it) {
        out.iterations = it;
        if (norm(f) <= tol) {
            out.converged = true;
            break;
        }
        Eigen::MatrixXd J(f.size(), n);
        for (size_t j = 0; j < n; ++j) {
            const double h = 1e-7 * (1.0 + std::abs(x[j]));
            auto xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            auto fp = residual(xp), fm = residual(xm);
            for (size_t i = 0; i < f.size(); ++i) J(i, j) = (fp[i] - fm[i]) / (2 * h);
        }
        Eigen::VectorXd rhs(f.size());
        for (size_t i = 0; i < f.size(); ++i) rhs(i) = -f[i];
        Eigen::VectorXd dx = J.colPivHouseholderQr().solve(rhs);
        double lambda = 1.0;
        std::vector<double> xn(n), fn;
        for (int ls = 0; ls < 30; ++ls, lambda *= 0.5) {
            for (size_t j = 0; j < n; ++j) xn[j] = x[j] + lambda * dx(j);
            fn = residual(xn);
            if (norm(fn) < norm(f) || ls == 29) break;
        }
        x = xn;
        f = fn;
    }
    if (!out.converged && norm(f) <= tol) out.converged = true;
    out.x = x;
    out.residual = norm(f);
    return out;
}

double derivative_at(const std::function<double(double)>& f, double x0, int n) {
    if (n == 0) return f(x0);
    const double h = n == 1 ? 1e-4 : 1e-3;
    return numlab::fd_derivative(f, x0, n, h);
}

std::optional<OdeOracle> oracle_for(const ProblemSpec& spec) {
    const Expr lhs = spec.expr("equation.lhs");
    auto p = [](const Values& v, const char* k) {
        auto it = v.find(k);
        if (it == v.end()) throw std::invalid_argument(std::string("oracle needs parameter ") + k);
        return it->second;
    };
    if (spec.dep == "y" && spec.var == "tau" && lhs == parse("y'' + y' + eps*y"))
        return OdeOracle{2, [p](double, const std::vector<double>& y, const Values& v) {
                             return -y[1] - p(v, "eps") * y[0];
                         }};
    if (spec.dep == "y" && spec.var == "t" && lhs == parse("y'' + (1/4 + eps*a1 + 2*eps*cos(t))*y"))
        return OdeOracle{2, [p](double t, const std::vector<double>& y, const Values& v) {
                             const double e = p(v, "eps");
                             return -(0.25 + e * p(v, "a1") + 2.0 * e * std::cos(t)) * y[0];
                         }};
    if (spec.dep == "W" && spec.var == "theta" && lhs == parse("W''' + W' + 9*eps*delta^-2*k^-2*W*W'"))
        return OdeOracle{3, [p](double, const std::vector<double>& y, const Values& v) {
                             const double dk = p(v, "delta") * p(v, "k");
                             return -y[1] - 9.0 * p(v, "eps") / (dk * dk) * y[0] * y[1];
                         }};
    if (spec.dep == "y" && spec.var == "t" && lhs == parse("y'' + eps*y' + y"))
        return OdeOracle{2, [p](double, const std::vector<double>& y, const Values& v) {
                             return -p(v, "eps") * y[1] - y[0];
                         }};
    return std::nullopt;
}

std::vector<double> oracle_curve(const OdeOracle& o, const Values& p, const std::vector<double>& y0, double x0,
                                 const std::vector<double>& xs, double step) {
    if (static_cast<int>(y0.size()) != o.order) throw std::invalid_argument("oracle needs one initial value per order");
    numlab::IVPOptions opts;
    opts.method = numlab::Method::RK4Fixed;
    opts.step = step;
    double x1 = x0;
    for (double x : xs) x1 = std::max(x1, x);
    auto sol = numlab::solve_ivp(
        [&](double x, const numlab::State& y, numlab::State& dy) {
            for (int i = 0; i + 1 < o.order; ++i) dy[i] = y[i + 1];
            dy[o.order - 1] = o.highest(x, y, p);
        },
        y0, x0, x1, opts);
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(sol.at(x, 0));
    return out;
}

double sup_error(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

} // namespace hsym::cli::detail
