#include "hsym/bcpert.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hsym::bcpert {

using exprcore::parse;

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

// Standard E_n(x) = integral_1^inf e^{-xt} t^-n dt.
double expint_en(int n, double x) {
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    const double tol = 1e-16;
    const int nm1 = n - 1;
    if (x > 1.0) {
        // modified Lentz on the continued fraction
        double b = x + n;
        double c = 1.0 / tiny;
        double d = 1.0 / b;
        double h = d;
        for (int i = 1; i < 100000; ++i) {
            double an = -static_cast<double>(i) * (nm1 + i);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            double del = c * d;
            h *= del;
            if (std::abs(del - 1.0) < tol) return h * std::exp(-x);
        }
        throw std::runtime_error("exp_integral: continued fraction did not converge");
    }
    double ans = nm1 != 0 ? 1.0 / nm1 : -std::log(x) - kEulerGamma;
    double fact = 1.0;
    for (int i = 1; i < 100000; ++i) {
        fact *= -x / i;
        double del;
        if (i != nm1) {
            del = -fact / (i - nm1);
        } else {
            double psi = -kEulerGamma;
            for (int ii = 1; ii <= nm1; ++ii) psi += 1.0 / ii;
            del = fact * (-std::log(x) + psi);
        }
        ans += del;
        if (std::abs(del) < std::abs(ans) * tol) return ans;
    }
    throw std::runtime_error("exp_integral: series did not converge");
}

} // namespace

double exp_integral(int n, double x) {
    if (n < 1) throw std::domain_error("exp_integral: n must be positive");
    if (!(x > 0.0)) throw std::domain_error("exp_integral: x must be positive");
    double en = expint_en(n, x);
    return n == 1 ? en : en * std::pow(x, 1 - n);
}

void bind_exp_integrals(double x, double eps, std::map<std::string, double>& v) {
    v["x"] = x;
    v["eps"] = eps;
    v["E1"] = exp_integral(1, x);
    v["E12"] = exp_integral(1, 2 * x);
    v["E2"] = exp_integral(2, x);
    v["E1eps"] = exp_integral(1, eps);
    v["E12eps"] = exp_integral(1, 2 * eps);
    v["E2eps"] = exp_integral(2, eps);
}

exprcore::DiffContext switchback_diff_context() {
    exprcore::DiffContext ctx;
    ctx.var = "x";
    ctx.rules["E1"] = parse("-exp(-x)*x^-1");
    ctx.rules["E12"] = parse("-exp(-2*x)*x^-1");
    ctx.rules["E2"] = parse("-exp(-x)*x^-2");
    return ctx;
}

namespace {

Expr apply_operator(const Expr& v, int n) {
    auto ctx = switchback_diff_context();
    Expr d1 = exprcore::diff(v, ctx);
    Expr d2 = exprcore::diff(d1, ctx);
    return d2 + Expr(n - 1) * parse("x^-1") * d1 + d1;
}

} // namespace

Expr switchback_residual(const SwitchbackSeries& s, int j) {
    const int n = s.problem.n;
    Expr lhs = apply_operator(s.orders.at(j), n);
    if (j < 2) return lhs;
    auto ctx = switchback_diff_context();
    const Expr& u1 = s.orders[1];
    Expr du1 = exprcore::diff(u1, ctx);
    Expr f = -(u1 * du1) - Expr(s.problem.delta) * du1 * du1;
    return lhs - f;
}

SwitchbackSeries switchback_series(const SwitchbackProblem& p) {
    if ((p.n != 2 && p.n != 3) || (p.delta != 0 && p.delta != 1) || p.order < 0 || p.order > 2 ||
        (p.n == 3 && p.order > 1))
        throw std::invalid_argument("unsupported switchback combination n=" + std::to_string(p.n) +
                                    ", delta=" + std::to_string(p.delta) + ", order=" + std::to_string(p.order));
    SwitchbackSeries s;
    s.problem = p;
    const std::string en = p.n == 2 ? "E1" : "E2";
    s.orders.push_back(Expr(1));
    if (p.order >= 1) {
        s.orders.push_back(parse("A + B*" + en));
        s.constants = {{"A", 1}, {"B", 1}};
        s.bc_values["A"] = Expr();
        s.bc_values["B"] = -Expr::sym(en + "eps").pow(-1);
    }
    if (p.order >= 2) {
        Expr u2 = parse("2*B^2*E12 - B^2*E1*exp(-x) - A*B*exp(-x) + C*E1 + D");
        if (p.delta == 1) u2 += parse("-B^2*E1^2/2");
        s.orders.push_back(u2);
        s.constants.emplace_back("C", 2);
        s.constants.emplace_back("D", 2);
        // u2(inf) = 0 gives D = 0; u2(eps) = 0 fixes C.
        Expr rest = exprcore::substitute(u2, {{"C", Expr()}, {"D", Expr()}});
        rest = exprcore::substitute(rest, {{"E1", Expr::sym("E1eps")}, {"E12", Expr::sym("E12eps")},
                                           {"x", Expr::sym("eps")}, {"A", s.bc_values["A"]}, {"B", s.bc_values["B"]}});
        s.bc_values["D"] = Expr();
        s.bc_values["C"] = -rest * Expr::sym("E1eps").pow(-1);
    }
    for (const auto& o : s.orders) s.fitted.push_back(exprcore::substitute(o, s.bc_values));
    return s;
}

double SwitchbackSeries::operator()(double x, int m) const {
    if (m > problem.order) throw std::out_of_range("order beyond the computed series");
    std::map<std::string, double> v;
    bind_exp_integrals(x, problem.eps, v);
    double sum = 0.0, ap = 1.0;
    for (int j = 0; j <= m; ++j) {
        sum += ap * exprcore::evaluate_real(fitted[j], v);
        ap *= problem.a;
    }
    return sum;
}

MostDivergentSum most_divergent_sum(double eps, double a) {
    MostDivergentSum m;
    m.eps = eps;
    m.a = a;
    m.free_form = {Expr(1), Expr(1), parse("1 + a*B*E1")};
    m.form = hiddenscale::LogForm{Expr(1), Expr(1), parse("1 + (exp(-a) - 1)*E1*E1eps^-1")}.normalized("E1");
    return m;
}

double MostDivergentSum::operator()(double x) const {
    std::map<std::string, double> v;
    bind_exp_integrals(x, eps, v);
    v["a"] = a;
    return form.evaluate(v);
}

double MostDivergentSum::radius(double x) const { return exp_integral(1, eps) / exp_integral(1, x); }

double most_divergent_partial_sum(double z, int terms) {
    double s = 0.0, zn = 1.0;
    for (int n = 1; n <= terms; ++n) {
        zn *= z;
        s += (n % 2 == 1 ? zn : -zn) / n;
    }
    return s;
}

hiddenscale::LogForm terrible_exact_asymptotic() {
    return hiddenscale::LogForm{Expr(), Expr(1), parse("exp(1) + (1 - exp(1))*E1*E1eps^-1")}.normalized("E1");
}

TerribleHiddenScale terrible_hidden_scale(double eps, double a) {
    if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("terrible_hidden_scale: need 0 < a <= 1");
    pertseries::PerturbationSeries ts;
    ts.param = "a";
    ts.var = "tau";
    ts.orders = {Expr(1), parse("A + B*tau"), parse("-B^2*tau^2/2")};
    ts.constants = {{"A", 1}, {"B", 1}};

    TerribleHiddenScale out;
    auto ps = hiddenscale::paint(ts, 1);
    hiddenscale::FTOptions fo;
    fo.reference_order = 1;
    out.ft = hiddenscale::derive_ft_system(ps, 2, fo);
    out.flows = hiddenscale::integrate_orbits(out.ft, "tau");
    out.tau_form = hiddenscale::assemble_uniform(ps, out.flows);
    if (!out.tau_form.log_form) throw std::runtime_error("terrible problem: expected a logarithmic uniform form");

    // u(x = inf) = 1 gives A~ = 0; u(eps) = 1 - a fixes a*B~.
    std::map<std::string, Expr> bc{{"A~", Expr()},
                                   {"B~", parse("(exp(-a) - 1)*a^-1*E1eps^-1")},
                                   {"tau", Expr::sym("E1")}};
    const auto& lf = *out.tau_form.log_form;
    out.form = hiddenscale::LogForm{exprcore::substitute(lf.c0, bc), exprcore::substitute(lf.coef, bc),
                                    exprcore::substitute(lf.arg, bc)}
                   .normalized("E1");
    out.solution.log_form = out.form;
    out.solution.var = "x";
    out.solution.flows = out.flows;
    out.solution.asymptotic_only = true;
    out.solution.provenance = out.tau_form.provenance + "; tau = e1(x)";
    out.solution.binder = [eps, a](double x, std::map<std::string, double>& v) {
        bind_exp_integrals(x, eps, v);
        v["a"] = a;
    };
    return out;
}

} // namespace hsym::bcpert
