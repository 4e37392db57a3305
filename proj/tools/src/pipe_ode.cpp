#include "common.hpp"

#include <cmath>
#include <stdexcept>

namespace hsym::cli::detail {

using exprcore::parse;
using exprcore::print;
using exprcore::Q;

namespace {

Q term_order(const exprcore::Term& t, const std::string& param, const std::map<std::string, Q>& assumptions) {
    Q o = exprcore::mono_exp(t.m, param);
    for (const auto& [sym, q] : assumptions) o += q * exprcore::mono_exp(t.m, sym);
    return o;
}

// Terms of e at its lowest order in param, counting the assumed orders of unknowns.
Expr leading_part(const Expr& e, const std::string& param, const std::map<std::string, Q>& assumptions, Q* order) {
    std::optional<Q> lo;
    for (const auto& t : e.terms()) {
        Q o = term_order(t, param, assumptions);
        if (!lo || o < *lo) lo = o;
    }
    std::vector<exprcore::Term> keep;
    for (const auto& t : e.terms())
        if (term_order(t, param, assumptions) == *lo) keep.push_back(t);
    if (order && lo) *order = *lo;
    return Expr::from_terms(std::move(keep));
}

struct Strained {
    Expr q;          // in the amplitude tilde A1
    Expr special;    // special solution through order k-1
    Expr uniform;    // with symbol q
    std::string amp, phase;
};

Strained strained_coordinate(const ProblemSpec& spec, const HiddenScaleRun& run) {
    const auto names = spec.list("method.zeroth_names");
    if (names.size() != 2) spec.fail("method.post", "strained_coordinate needs zeroth_names = amplitude, phase");
    Strained s;
    s.amp = names[0];
    s.phase = names[1];
    const Expr& F = run.ft.rhs_of(s.phase);
    if (!run.ft.rhs_of(s.amp).is_zero())
        throw std::runtime_error("strained coordinate needs a constant amplitude, got " + s.amp + "' = " +
                                 print(run.ft.rhs_of(s.amp)));
    // phi(0) = phi~ - x*F with phi~ = 0, so the phase x + phi becomes (1 - q)*x
    s.q = exprcore::substitute(F, {{s.amp, Expr::sym("A1")}, {s.phase, Expr()}});
    s.special = exprcore::truncate(run.uniform.special, spec.param, run.problem.order - 1);
    s.uniform = exprcore::substitute(s.special, {{s.amp, Expr::sym("A1")},
                                                 {s.phase, Expr()},
                                                 {spec.var, (Expr(1) - Expr::sym("q")) * Expr::sym(spec.var)}});
    return s;
}

struct Amplitude {
    std::string unknown;
    Expr rhs;         // of the second derivative
    Q assumed;        // order of the first derivative from the assumption
    std::optional<Q> found;
};

std::vector<Amplitude> amplitude_equations(const HiddenScaleRun& run) {
    const auto& ft = run.ft;
    const auto& as = ft.order_assumptions;
    std::vector<Amplitude> out;
    for (size_t i = 0; i < ft.unknowns.size(); ++i) {
        const std::string& u = ft.unknowns[i];
        if (as.count(u)) continue;
        Q lo;
        Expr lead = leading_part(ft.rhs[i], ft.param, as, &lo);
        // A' = c*alpha at leading order
        if (!lead.is_single_term()) throw std::runtime_error("no single leading term in " + u + "'");
        const auto& t = lead.terms().front();
        std::string alpha;
        for (const auto& [sym, q] : as)
            if (exprcore::mono_exp(t.m, sym) == 1) alpha = sym;
        if (alpha.empty()) throw std::runtime_error("leading term of " + u + "' is not an assumed-order unknown");
        Expr c = exprcore::substitute(lead, alpha, Expr(1));
        Amplitude a;
        a.unknown = u;
        a.rhs = leading_part(c * ft.rhs_of(alpha), ft.param, as, nullptr);
        a.assumed = as.at(alpha);
        auto lo2 = hiddenscale::leading_order(a.rhs, ft.param);
        // A'' = O(param^p) means A' = O(param^(p/2))
        if (lo2) a.found = *lo2 / 2;
        out.push_back(a);
    }
    return out;
}

struct OdeFit {
    Values values;            // parameters plus fitted tildes
    Values bare_values;       // parameters plus fitted bare constants
    FitResult uniform_fit, bare_fit;
};

std::vector<double> ic_residual(const std::function<double(double)>& f, double x0,
                                const std::vector<std::pair<int, double>>& ics) {
    std::vector<double> r;
    for (const auto& [n, v] : ics) r.push_back(derivative_at(f, x0, n) - v);
    return r;
}

double symbolic_derivative(const Expr& e, const std::string& var, double x0, int n, Values v) {
    v[var] = x0;
    return exprcore::evaluate_real(exprcore::diff_n(e, exprcore::DiffContext{var, {}, {}}, n), v);
}

OdeFit fit_ode(const ProblemSpec& spec, const HiddenScaleRun& run, const Values& params) {
    OdeFit out;
    const auto ics = spec.initial_conditions();
    const double x0 = spec.number("ics.at", 0.0);
    const auto& tildes = run.flows.tildes;
    std::vector<double> guess(tildes.size(), 0.0);
    if (!guess.empty()) guess[0] = 1.0;

    auto uniform_values = [&](const std::vector<double>& x) {
        Values v = params;
        for (size_t i = 0; i < tildes.size(); ++i) v[tildes[i]] = x[i];
        return v;
    };
    out.uniform_fit = newton_fit(
        [&](const std::vector<double>& x) {
            Values v = uniform_values(x);
            if (run.uniform.symbolic) {
                std::vector<double> r;
                for (const auto& [n, val] : ics) r.push_back(symbolic_derivative(*run.uniform.symbolic, spec.var, x0, n, v) - val);
                return r;
            }
            return ic_residual([&](double s) { return run.uniform(s, v); }, x0, ics);
        },
        guess);
    out.values = uniform_values(out.uniform_fit.x);

    // bare series: constants of order 0 fitted, the rest zero
    const Expr bare = run.bare.sum();
    const auto c0 = run.bare.constants_at(0);
    auto bare_values = [&](const std::vector<double>& x) {
        Values v = params;
        for (const auto& [name, order] : run.bare.constants) v[name] = 0.0;
        for (size_t i = 0; i < c0.size(); ++i) v[c0[i]] = x[i];
        return v;
    };
    std::vector<double> bguess(c0.size(), 0.0);
    if (!bguess.empty()) bguess[0] = 1.0;
    out.bare_fit = newton_fit(
        [&](const std::vector<double>& x) {
            Values v = bare_values(x);
            std::vector<double> r;
            for (const auto& [n, val] : ics) r.push_back(symbolic_derivative(bare, spec.var, x0, n, v) - val);
            return r;
        },
        bguess);
    out.bare_values = bare_values(out.bare_fit.x);
    return out;
}

struct Curves {
    std::vector<double> xs, oracle, uniform, bare;
    double uniform_sup = 0, bare_sup = 0, uniform_end = 0, bare_end = 0;
    OdeFit fit;
};

Curves ode_curves(const ProblemSpec& spec, const HiddenScaleRun& run, const OdeOracle& oracle, const Values& params) {
    Curves c;
    c.fit = fit_ode(spec, run, params);
    if (!c.fit.uniform_fit.converged)
        throw std::runtime_error("tilde fit did not converge (residual " + fmt(c.fit.uniform_fit.residual) + ")");
    c.xs = spec.grid("validation.grid");
    std::vector<double> y0;
    for (const auto& [n, v] : spec.initial_conditions()) y0.push_back(v);
    c.oracle = oracle_curve(oracle, params, y0, spec.number("ics.at", 0.0), c.xs);
    c.uniform = run.uniform.on_grid(c.xs, c.fit.values);
    const Expr bare = run.bare.sum();
    for (double x : c.xs) {
        Values v = c.fit.bare_values;
        v[spec.var] = x;
        c.bare.push_back(exprcore::evaluate_real(bare, v));
    }
    c.uniform_sup = sup_error(c.oracle, c.uniform);
    c.bare_sup = sup_error(c.oracle, c.bare);
    c.uniform_end = std::abs(c.oracle.back() - c.uniform.back());
    c.bare_end = std::abs(c.oracle.back() - c.bare.back());
    return c;
}

// KdV-type validation through the strained coordinate
struct StrainedCurves {
    std::vector<double> xs, oracle, uniform, textbook;
    double A1 = 0, A1_text = 0, q = 0, q_text = 0;
    double uniform_sup = 0, textbook_sup = 0;
    std::vector<double> ic_miss;
};

StrainedCurves strained_curves(const ProblemSpec& spec, const Strained& s, const OdeOracle& oracle, const Values& params) {
    StrainedCurves c;
    const auto ics = spec.initial_conditions();
    const double x0 = spec.number("ics.at", 0.0);
    double slope = 0.0;
    for (const auto& [n, v] : ics)
        if (n == 1) slope = v;
    const Expr q_text = parse("27/16*A1^2*eps^2*k^-5*delta^-4");
    auto fit = [&](const Expr& qe) {
        auto vals = [&](double a1) {
            Values v = params;
            v["A1"] = a1;
            v["q"] = exprcore::evaluate_real(qe, v);
            return v;
        };
        auto r = newton_fit(
            [&](const std::vector<double>& x) {
                return std::vector<double>{symbolic_derivative(s.uniform, spec.var, x0, 1, vals(x[0])) - slope};
            },
            {slope});
        if (!r.converged) throw std::runtime_error("amplitude fit did not converge");
        return vals(r.x[0]);
    };
    Values hv = fit(s.q), tv = fit(q_text);
    c.A1 = hv["A1"];
    c.q = hv["q"];
    c.A1_text = tv["A1"];
    c.q_text = tv["q"];
    for (const auto& [n, v] : ics) c.ic_miss.push_back(symbolic_derivative(s.uniform, spec.var, x0, n, hv) - v);

    c.xs = spec.grid("validation.grid");
    std::vector<double> y0;
    for (const auto& [n, v] : ics) y0.push_back(v);
    c.oracle = oracle_curve(oracle, params, y0, x0, c.xs);
    for (double x : c.xs) {
        hv[spec.var] = x;
        tv[spec.var] = x;
        c.uniform.push_back(exprcore::evaluate_real(s.uniform, hv));
        c.textbook.push_back(exprcore::evaluate_real(s.uniform, tv));
    }
    c.uniform_sup = sup_error(c.oracle, c.uniform);
    c.textbook_sup = sup_error(c.oracle, c.textbook);
    return c;
}

std::string post_of(const ProblemSpec& spec) { return spec.str("method.post", "none"); }

// numeric comparisons may use a higher order than the derivation
int numeric_order(const ProblemSpec& spec) {
    return spec.has("validation.order") ? spec.integer("validation.order", 1) : spec.integer("method.order", 1);
}

} // namespace

void derive_ode(const ProblemSpec& spec, RunReport& r) {
    auto run = hidden_scale(spec);
    report_hidden_scale(run, r);
    const std::string post = post_of(spec);
    if (post == "strained_coordinate") {
        auto s = strained_coordinate(spec, run);
        r.line("strained coordinate", "q = " + print(s.q));
        r.line("strained coordinate", spec.dep + " = " + print(s.uniform));
    } else if (post == "amplitude_equations") {
        for (const auto& a : amplitude_equations(run)) {
            r.line("amplitude equations", hiddenscale::format_equation(a.unknown + "''", a.rhs, {a.unknown}));
            std::string found = a.found ? exprcore::q_to_string(*a.found) : "none";
            r.line("amplitude equations", a.unknown + "' = O(" + spec.param + "^" + found + "), assumed O(" +
                                              spec.param + "^" + exprcore::q_to_string(a.assumed) + ")");
            r.check("order assumption for " + a.unknown, a.found && *a.found == a.assumed,
                    "leading order of " + a.unknown + "'' gives q = " + found);
        }
    } else if (post != "none") {
        spec.fail("method.post", "unknown post step '" + post + "' (none, strained_coordinate, amplitude_equations)");
    }
}

std::map<std::string, double> metrics_ode(const ProblemSpec& spec, const Values& overrides) {
    auto oracle = oracle_for(spec);
    if (!oracle) throw std::runtime_error("no independent oracle for equation " + spec.str("equation.lhs"));
    auto run = hidden_scale(spec, numeric_order(spec));
    const Values params = parameters(spec, overrides);
    if (post_of(spec) == "strained_coordinate") {
        auto c = strained_curves(spec, strained_coordinate(spec, run), *oracle, params);
        return {{"uniform_sup", c.uniform_sup}, {"textbook_sup", c.textbook_sup}, {"A1", c.A1}, {"q", c.q}};
    }
    auto c = ode_curves(spec, run, *oracle, params);
    return {{"uniform_sup", c.uniform_sup}, {"bare_sup", c.bare_sup}, {"uniform_end", c.uniform_end}, {"bare_end", c.bare_end}};
}

void validate_ode(const ProblemSpec& spec, const RunOptions& opts, RunReport& r) {
    derive_ode(spec, r);
    const std::string post = post_of(spec);
    if (post == "amplitude_equations") return;  // symbolic checks only
    auto oracle = oracle_for(spec);
    if (!r.check("independent oracle", oracle.has_value(), oracle ? "hand-written right-hand side" : "none for this equation"))
        return;
    auto run = hidden_scale(spec, numeric_order(spec));
    const Values params = parameters(spec);
    if (spec.has("validation.order")) r.value("validation_order", numeric_order(spec));

    if (post == "strained_coordinate") {
        auto s = strained_coordinate(spec, run);
        auto c = strained_curves(spec, s, *oracle, params);
        r.value("A1", c.A1);
        r.value("q", c.q);
        r.value("uniform_sup", c.uniform_sup);
        double miss = 0;
        for (double m : c.ic_miss) miss = std::max(miss, std::abs(m));
        r.check("initial conditions", miss < 1e-8, "max miss " + fmt(miss));
        if (opts.compare_textbook) {
            r.value("A1_textbook", c.A1_text);
            r.value("q_textbook", c.q_text);
            r.value("textbook_sup", c.textbook_sup);
        }
        const double ratio = spec.number("tol.textbook_ratio", 0.5);
        r.check("hidden-scale error vs textbook", c.uniform_sup <= ratio * c.textbook_sup,
                fmt(c.uniform_sup) + " <= " + fmt_fixed(ratio, 2) + " * " + fmt(c.textbook_sup));
        CsvTable t{spec.name + "_solution", {spec.var, "oracle", "hidden_scale"}, {}};
        if (opts.compare_textbook) t.headers.push_back("textbook");
        for (size_t i = 0; i < c.xs.size(); ++i) {
            std::vector<double> row{c.xs[i], c.oracle[i], c.uniform[i]};
            if (opts.compare_textbook) row.push_back(c.textbook[i]);
            t.rows.push_back(row);
        }
        r.tables.push_back(std::move(t));
        return;
    }

    auto c = ode_curves(spec, run, *oracle, params);
    for (size_t i = 0; i < run.flows.tildes.size(); ++i) r.value(run.flows.tildes[i], c.fit.values.at(run.flows.tildes[i]));
    r.value("uniform_sup", c.uniform_sup);
    r.value("bare_sup", c.bare_sup);
    r.value("uniform_end", c.uniform_end);
    r.value("bare_end", c.bare_end);
    CsvTable t{spec.name + "_solution", {spec.var, "oracle", "uniform", "bare"}, {}};
    for (size_t i = 0; i < c.xs.size(); ++i) t.rows.push_back({c.xs[i], c.oracle[i], c.uniform[i], c.bare[i]});
    r.tables.push_back(std::move(t));

    if (spec.has("tol.bare_ratio")) {
        const double need = spec.number("tol.bare_ratio");
        r.check("bare vs uniform at window end", c.bare_end >= need * c.uniform_end,
                fmt(c.bare_end) + " >= " + fmt_fixed(need, 1) + " * " + fmt(c.uniform_end));
    }
    const std::string sweep_key = "sweep." + spec.param;
    if (spec.has(sweep_key)) {
        std::vector<std::pair<double, double>> errs;
        CsvTable sc{spec.name + "_scaling", {spec.param, "uniform_sup", "bare_sup"}, {}};
        for (double e : spec.numbers(sweep_key)) {
            auto m = metrics_ode(spec, {{spec.param, e}});
            errs.emplace_back(e, m["uniform_sup"]);
            sc.rows.push_back({e, m["uniform_sup"], m["bare_sup"]});
            r.value("uniform_sup(" + spec.param + "=" + fmt_fixed(e, 3) + ")", m["uniform_sup"]);
        }
        r.tables.push_back(std::move(sc));
        if (spec.has("tol.order_min") && errs.size() >= 3) {
            const double p = numlab::convergence_order(errs);
            const double lo = spec.number("tol.order_min"), hi = spec.number("tol.order_max", 1e9);
            r.value("convergence_order", p);
            r.check("convergence order", p >= lo && p <= hi,
                    "p = " + fmt_fixed(p, 3) + " in [" + fmt_fixed(lo, 2) + ", " + fmt_fixed(hi, 2) + "]");
        }
    }
    if (spec.has("tol.drift")) {
        // C = err/eps^(k+1) must be stable when eps is halved
        const double e = params.at(spec.param);
        const int k = numeric_order(spec);
        auto half = metrics_ode(spec, {{spec.param, e / 2}});
        const double c1 = c.uniform_sup / std::pow(e, k + 1), c2 = half["uniform_sup"] / std::pow(e / 2, k + 1);
        const double drift = std::max(c1, c2) / std::min(c1, c2);
        r.value("C(" + spec.param + ")", c1);
        r.value("C(" + spec.param + "/2)", c2);
        const double need = spec.number("tol.drift");
        r.check("error constant stable under halving", drift <= need, "drift " + fmt_fixed(drift, 3) + " <= " + fmt_fixed(need, 1));
        const double cmax = std::max(c1, c2);
        r.check("sup error within C*eps^2", c.uniform_sup <= cmax * std::pow(e, k + 1) * (1 + 1e-12),
                fmt(c.uniform_sup) + " <= " + fmt(cmax * std::pow(e, k + 1)));
    }
}

} // namespace hsym::cli::detail
