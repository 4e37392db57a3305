#include "hsym/hiddenscale.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hsym::hiddenscale {

using exprcore::BasisKey;
using exprcore::Evaluator;
using exprcore::Monomial;
using exprcore::OutOfClass;
using exprcore::Poly;
using exprcore::QI;
using exprcore::Term;

namespace {

Expr term_expr(const Term& t) { return Expr::from_terms({t}); }

bool term_has(const Term& t, const std::string& s) {
    return exprcore::mono_exp(t.m, s) != 0 || t.rate.contains(s) || t.phase.contains(s);
}

bool expr_has_any(const Expr& e, const std::vector<std::string>& syms) {
    for (const auto& s : syms)
        if (e.depends_on(s)) return true;
    return false;
}

Expr series_sum(const std::vector<Expr>& orders, const std::string& param) {
    Expr r;
    for (size_t j = 0; j < orders.size(); ++j) r += Expr::sym(param).pow(static_cast<int>(j)) * orders[j];
    return r;
}

} // namespace

// ---------------------------------------------------------------- painting

namespace {

bool is_divergent(const Term& t, const std::string& var, const Classifier& cls) {
    std::optional<bool> div;
    if (cls.pred) div = cls.pred(t);
    if (div) return *div;
    if (cls.mode == ClassifierMode::UserDeclared)
        throw std::invalid_argument("divergence classifier abstains on term " + exprcore::print(term_expr(t)));
    return exprcore::mono_exp(t.m, var) >= 1;
}

} // namespace

Expr paint_expr(const Expr& e, const std::string& var, const std::string& mu, const Classifier& cls) {
    std::vector<Term> out;
    for (const auto& t : e.terms()) {
        Term p = t;
        if (is_divergent(t, var, cls)) {
            int n = exprcore::mono_exp(t.m, var);
            if (n < 1)
                throw std::invalid_argument("divergent term has no power of " + var + " to paint: " +
                                            exprcore::print(term_expr(t)));
            p.m = exprcore::mono_with(exprcore::mono_with(t.m, var, 0), mu, exprcore::mono_exp(t.m, mu) + n);
        }
        out.push_back(std::move(p));
    }
    return Expr::from_terms(std::move(out));
}

PaintedSeries paint(const PerturbationSeries& s, int n_derivs, const Classifier& cls, const std::string& mu) {
    PaintedSeries ps;
    ps.mu = mu;
    ps.series = s;
    for (auto& o : ps.series.orders) {
        if (o.depends_on(mu)) throw std::invalid_argument("series already contains the painting symbol " + mu);
        std::vector<Term> div;
        for (const auto& t : o.terms())
            if (is_divergent(t, s.var, cls)) div.push_back(t);
        ps.painted_terms.push_back(Expr::from_terms(std::move(div)));
        o = paint_expr(o, s.var, mu, cls);
    }
    for (int d = 1; d <= n_derivs; ++d) {
        std::vector<Expr> row;
        for (const auto& o : s.orders)
            row.push_back(paint_expr(exprcore::diff_n(o, exprcore::DiffContext{s.var, {}, {}}, d), s.var, mu, cls));
        ps.derivs.push_back(std::move(row));
    }
    return ps;
}

// ---------------------------------------------------------------- FT system

const Expr& FTSystem::rhs_of(const std::string& u) const {
    for (size_t i = 0; i < unknowns.size(); ++i)
        if (unknowns[i] == u) return rhs[i];
    throw std::out_of_range("not an unknown of the FT system: " + u);
}

namespace {

Q assumed_order(const Term& t, const std::map<std::string, Q>& oa) {
    Q o = 0;
    for (const auto& [s, e] : t.m) {
        auto it = oa.find(s);
        if (it != oa.end()) o += it->second * e;
    }
    return o;
}

Expr drop_beyond(const Expr& e, const std::map<std::string, Q>& oa, const Q& base, const Q& limit) {
    if (oa.empty()) return e;
    std::vector<Term> keep;
    for (const auto& t : e.terms())
        if (base + assumed_order(t, oa) <= limit) keep.push_back(t);
    return Expr::from_terms(std::move(keep));
}

} // namespace

FTSystem derive_ft_system(const PaintedSeries& ps, int k, const FTOptions& opts) {
    const auto& s = ps.series;
    FTSystem ft;
    ft.param = s.param;
    ft.mu = ps.mu;
    ft.var = s.var;
    ft.order = k;
    ft.reference_order = opts.reference_order;
    ft.order_assumptions = opts.order_assumptions;
    const int r = opts.reference_order;
    ft.unknowns = opts.unknowns.empty() ? s.constants_at(r) : opts.unknowns;
    if (ft.unknowns.empty()) throw std::invalid_argument("no integration constants at the reference order");
    if (r >= static_cast<int>(s.orders.size())) throw std::invalid_argument("reference order beyond the series");
    const size_t n = ft.unknowns.size();
    const int max_rows = ps.n_derivs() + 1;
    const std::set<std::string> basis{s.var};

    // Coefficient blocks of the unknowns' derivatives, per derivative row.
    std::vector<std::vector<std::map<BasisKey, Expr>>> lhs(max_rows, std::vector<std::map<BasisKey, Expr>>(n));
    for (int d = 0; d < max_rows; ++d)
        for (size_t i = 0; i < n; ++i) lhs[d][i] = exprcore::split_basis(exprcore::diff(ps.row(d, r), ft.unknowns[i]), basis);

    ft.by_order.assign(n, {});
    const int pmax = std::min(k - r, static_cast<int>(s.orders.size()) - 1 - r);
    const Q limit = k - r;
    for (int p = 0; p <= pmax; ++p) {
        std::vector<Expr> rhs_rows(max_rows);
        for (int d = 0; d < max_rows; ++d) {
            Expr acc = exprcore::diff(ps.row(d, r + p), ps.mu);
            acc = drop_beyond(acc, opts.order_assumptions, Q(p), limit);
            for (int m = 0; m < p; ++m)
                for (size_t i = 0; i < n; ++i) {
                    const Expr& a = ft.by_order[i][m];
                    if (a.is_zero()) continue;
                    acc += drop_beyond(a * exprcore::diff(ps.row(d, r + p - m), ft.unknowns[i]), opts.order_assumptions,
                                       Q(p), limit);
                }
            rhs_rows[d] = -acc;
        }

        bool done = false;
        for (int rows = 1; rows <= max_rows && !done; ++rows) {
            std::vector<std::vector<Expr>> a;
            std::vector<Expr> b;
            std::vector<std::pair<int, BasisKey>> tags;
            for (int d = 0; d < rows; ++d) {
                std::set<BasisKey> keys;
                for (size_t i = 0; i < n; ++i)
                    for (const auto& [key, c] : lhs[d][i]) keys.insert(key);
                auto rb = exprcore::split_basis(rhs_rows[d], basis);
                for (const auto& [key, c] : rb) keys.insert(key);
                for (const auto& key : keys) {
                    std::vector<Expr> row(n);
                    for (size_t i = 0; i < n; ++i) {
                        auto it = lhs[d][i].find(key);
                        if (it != lhs[d][i].end()) row[i] = it->second;
                    }
                    auto it = rb.find(key);
                    a.push_back(std::move(row));
                    b.push_back(it == rb.end() ? Expr() : it->second);
                    tags.emplace_back(d, key);
                }
            }
            auto sol = exprcore::solve_linear(a, b);
            if (!sol.consistent()) {
                const auto& [d, key] = tags[sol.inconsistent_rows.front()];
                std::ostringstream msg;
                msg << "no hidden-scale symmetry for this painting: order " << r + p << ", derivative row " << d
                    << ", basis function " << exprcore::to_string(key) << " gives inconsistent equation";
                throw std::runtime_error(msg.str());
            }
            if (sol.unique()) {
                for (size_t i = 0; i < n; ++i) ft.by_order[i].push_back(sol.x[i]);
                ft.rows_used.push_back(rows);
                done = true;
            }
        }
        if (!done)
            throw std::runtime_error("FT system underdetermined at order " + std::to_string(r + p) + " after " +
                                     std::to_string(max_rows) + " derivative rows");
    }
    ft.rhs.assign(n, Expr());
    for (size_t i = 0; i < n; ++i)
        for (size_t p = 0; p < ft.by_order[i].size(); ++p)
            ft.rhs[i] += Expr::sym(ft.param).pow(static_cast<int>(p)) * ft.by_order[i][p];
    return ft;
}

FilterResult most_divergent_filter(const PerturbationSeries& s, const std::string& rank_symbol, int reference_order) {
    const std::string rs = rank_symbol.empty() ? s.var : rank_symbol;
    FilterResult out;
    out.series = s;
    for (size_t j = reference_order + 1; j < s.orders.size(); ++j) {
        const auto& terms = s.orders[j].terms();
        int top = 0;
        for (const auto& t : terms) top = std::max(top, exprcore::mono_exp(t.m, rs));
        if (top == 0) continue;
        std::vector<Term> keep;
        for (const auto& t : terms)
            if (exprcore::mono_exp(t.m, rs) == top) keep.push_back(t);
        if (keep.size() != terms.size()) out.asymptotic_only = true;
        out.series.orders[j] = Expr::from_terms(std::move(keep));
    }
    return out;
}

// ---------------------------------------------------------------- orbits

Expr antiderivative(const Expr& e, const std::string& mu) {
    Expr out;
    for (const auto& t : e.terms()) {
        int n = exprcore::mono_exp(t.m, mu);
        if (n < 0) throw OutOfClass("negative power of " + mu + " in a quadrature");
        auto [rate_mu, rate_rest] = t.rate.split(mu);
        auto [phase_mu, phase_rest] = t.phase.split(mu);
        // lambda = coefficient of mu in the exponent
        std::vector<Poly::Entry> lr, lp;
        for (const auto& [m, c] : rate_mu.entries()) {
            if (exprcore::mono_exp(m, mu) != 1) throw OutOfClass("exponent not linear in " + mu);
            lr.emplace_back(exprcore::mono_with(m, mu, 0), c);
        }
        for (const auto& [m, c] : phase_mu.entries()) {
            if (exprcore::mono_exp(m, mu) != 1) throw OutOfClass("exponent not linear in " + mu);
            lp.emplace_back(exprcore::mono_with(m, mu, 0), c);
        }
        Expr lambda = Expr::from_poly(Poly::from_entries(lr)) + Expr::imag_unit() * Expr::from_poly(Poly::from_entries(lp));

        Term base = t;
        base.m = exprcore::mono_with(t.m, mu, 0);
        Expr with_exp = term_expr(base);   // c * rest * e^{lambda mu}
        base.rate = rate_rest;
        base.phase = phase_rest;
        Expr without_exp = term_expr(base);
        if (lambda.is_zero()) {
            out += with_exp * Expr::sym(mu).pow(n + 1) * Expr(Q(1, n + 1));
            continue;
        }
        if (!lambda.is_single_term()) throw OutOfClass("frequency " + exprcore::print(lambda) + " is not invertible");
        Expr inv = lambda.inverse();
        Expr poly;
        Q fact = 1;  // n!/(n-k)!
        for (int kk = 0; kk <= n; ++kk) {
            if (kk > 0) fact *= (n - kk + 1);
            Q sign = (kk % 2 == 0) ? 1 : -1;
            poly += Expr(sign * fact) * Expr::sym(mu).pow(n - kk) * inv.pow(kk + 1);
        }
        // fact == n! here
        Q sign = (n % 2 == 0) ? 1 : -1;
        out += with_exp * poly - without_exp * Expr(sign * fact) * inv.pow(n + 1);
    }
    return out;
}

bool ConstantFlows::all_closed() const {
    return std::all_of(flows.begin(), flows.end(), [](const Flow& f) { return f.kind == FlowKind::Closed; });
}

bool ConstantFlows::any_numeric() const {
    return std::any_of(flows.begin(), flows.end(), [](const Flow& f) { return f.kind == FlowKind::Numeric; });
}

namespace {

// Returns c with e == c*u, if every term has u to the first power and no other unknown.
std::optional<Expr> linear_coefficient(const Expr& e, const std::string& u, const std::vector<std::string>& unknowns) {
    std::vector<Term> out;
    for (const auto& t : e.terms()) {
        if (exprcore::mono_exp(t.m, u) != 1 || t.rate.contains(u) || t.phase.contains(u)) return std::nullopt;
        Term c = t;
        c.m = exprcore::mono_with(t.m, u, 0);
        for (const auto& v : unknowns)
            if (term_has(c, v)) return std::nullopt;
        out.push_back(std::move(c));
    }
    return Expr::from_terms(std::move(out));
}

std::optional<Expr> square_coefficient(const Expr& e, const std::string& u, const std::vector<std::string>& unknowns,
                                       const std::string& mu) {
    if (!e.is_single_term()) return std::nullopt;
    Term t = e.terms().front();
    if (exprcore::mono_exp(t.m, u) != 2) return std::nullopt;
    t.m = exprcore::mono_with(t.m, u, 0);
    for (const auto& v : unknowns)
        if (term_has(t, v)) return std::nullopt;
    if (term_has(t, mu) || !t.rate.is_zero() || !t.phase.is_zero()) return std::nullopt;
    return term_expr(t);
}

struct CompiledRhs {
    std::vector<Evaluator> f;
    std::vector<double> slots;
    size_t n = 0;

    CompiledRhs(const FTSystem& ft, const std::map<std::string, double>& values) : n(ft.unknowns.size()) {
        std::vector<std::string> names{ft.mu};
        for (const auto& u : ft.unknowns) names.push_back(u);
        std::set<std::string> extra;
        for (const auto& e : ft.rhs)
            for (const auto& s : e.symbols())
                if (s != ft.mu && s != "pi" && std::find(ft.unknowns.begin(), ft.unknowns.end(), s) == ft.unknowns.end())
                    extra.insert(s);
        slots.assign(names.size() + extra.size(), 0.0);
        size_t k = names.size();
        for (const auto& s : extra) {
            auto it = values.find(s);
            if (it == values.end()) throw std::invalid_argument("no value for symbol " + s + " in the FT system");
            slots[k++] = it->second;
            names.push_back(s);
        }
        for (const auto& e : ft.rhs) f.emplace_back(e, names);
    }

    void operator()(double mu, const numlab::State& z, numlab::State& dz) {
        slots[0] = mu;
        for (size_t i = 0; i < n; ++i) slots[i + 1] = z[i];
        for (size_t i = 0; i < n; ++i) dz[i] = f[i](slots.data()).real();
    }
};

bool autonomous(const FTSystem& ft) {
    return std::none_of(ft.rhs.begin(), ft.rhs.end(), [&](const Expr& e) { return e.depends_on(ft.mu); });
}

numlab::IVPOptions flow_ivp_options() {
    numlab::IVPOptions o;
    o.method = numlab::Method::RK45Adaptive;
    o.rtol = 1e-10;
    o.atol = 1e-12;
    o.step = 1e-3;
    return o;
}

} // namespace

ConstantFlows integrate_orbits(const FTSystem& ft, const std::string& x_symbol, const OrbitOptions& opts) {
    ConstantFlows cf;
    cf.unknowns = ft.unknowns;
    cf.x = x_symbol;
    cf.ft = ft;
    const size_t n = ft.unknowns.size();
    for (const auto& u : ft.unknowns) cf.tildes.push_back(u + opts.tilde_suffix);
    cf.flows.assign(n, Flow{});
    std::vector<bool> solved(n, false);
    const Expr mu = Expr::sym(ft.mu);
    const Expr x = Expr::sym(x_symbol);

    auto at_x = [&](const Expr& e) { return exprcore::substitute(e, ft.mu, x); };

    bool progress = true;
    while (progress) {
        progress = false;
        for (size_t i = 0; i < n; ++i) {
            if (solved[i]) continue;
            const Expr& F = ft.rhs[i];
            const Expr tilde = Expr::sym(cf.tildes[i]);
            Flow& fl = cf.flows[i];

            if (auto c = linear_coefficient(F, ft.unknowns[i], ft.unknowns)) {
                Expr C = antiderivative(*c, ft.mu);
                if (C.as_poly()) {
                    fl.kind = FlowKind::Closed;
                    fl.at_zero = tilde * exprcore::exp(-at_x(C));
                    fl.along = tilde * exprcore::exp(C - at_x(C));
                    solved[i] = progress = true;
                    continue;
                }
            }
            if (auto c = square_coefficient(F, ft.unknowns[i], ft.unknowns, ft.mu)) {
                fl.kind = FlowKind::Rational;
                fl.num = tilde;
                fl.den = Expr(1) + *c * tilde * x;
                solved[i] = progress = true;
                continue;
            }
            // quadrature against solved constants
            bool self_free = !F.depends_on(ft.unknowns[i]);
            bool deps_solved = true;
            bool deps_closed = true;
            for (size_t j = 0; j < n; ++j) {
                if (j == i || !F.depends_on(ft.unknowns[j])) continue;
                if (!solved[j]) deps_solved = false;
                else if (!cf.flows[j].along) deps_closed = false;
            }
            if (!self_free || !deps_solved) continue;
            if (deps_closed) {
                std::map<std::string, Expr> repl;
                for (size_t j = 0; j < n; ++j)
                    if (j != i && F.depends_on(ft.unknowns[j])) repl[ft.unknowns[j]] = *cf.flows[j].along;
                try {
                    Expr G = exprcore::substitute(F, repl);
                    Expr I = antiderivative(G, ft.mu);
                    fl.kind = FlowKind::Closed;
                    fl.at_zero = tilde - at_x(I);
                    fl.along = tilde - at_x(I) + I;
                    solved[i] = progress = true;
                    continue;
                } catch (const OutOfClass&) {
                }
            }
            // u' = kappa * u_j with u_j a power-law flow: logarithm
            for (size_t j = 0; j < n; ++j) {
                if (j == i || cf.flows[j].kind != FlowKind::Rational || !solved[j]) continue;
                auto kappa = linear_coefficient(F, ft.unknowns[j], ft.unknowns);
                if (!kappa || kappa->depends_on(ft.mu) || !kappa->is_single_term()) continue;
                auto c = square_coefficient(ft.rhs[j], ft.unknowns[j], ft.unknowns, ft.mu);
                fl.kind = FlowKind::Log;
                fl.at_zero = tilde;
                fl.coef = -(*kappa) * c->inverse();
                fl.arg = cf.flows[j].den;
                solved[i] = progress = true;
                break;
            }
        }
    }
    if (opts.frozen_coefficients) {
        std::map<std::string, Expr> frozen;
        for (size_t i = 0; i < n; ++i) frozen[ft.unknowns[i]] = Expr::sym(cf.tildes[i]);
        for (size_t i = 0; i < n; ++i) {
            if (solved[i]) continue;
            Expr I = antiderivative(exprcore::substitute(ft.rhs[i], frozen), ft.mu);
            Flow& fl = cf.flows[i];
            fl.kind = FlowKind::Closed;
            fl.at_zero = Expr::sym(cf.tildes[i]) - at_x(I);
            fl.along = Expr::sym(cf.tildes[i]) - at_x(I) + I;
            solved[i] = true;
        }
    }
    for (size_t i = 0; i < n; ++i)
        if (!solved[i]) cf.flows[i].kind = FlowKind::Numeric;
    return cf;
}

std::vector<double> ConstantFlows::at_zero(double xv, const std::map<std::string, double>& values) const {
    const size_t n = unknowns.size();
    std::map<std::string, double> v = values;
    v[x] = xv;
    std::vector<double> tilde(n);
    for (size_t i = 0; i < n; ++i) {
        auto it = v.find(tildes[i]);
        if (it == v.end()) throw std::invalid_argument("no value for " + tildes[i]);
        tilde[i] = it->second;
    }
    std::vector<double> out(n);
    std::optional<numlab::State> numeric;
    for (size_t i = 0; i < n; ++i) {
        const Flow& f = flows[i];
        switch (f.kind) {
        case FlowKind::Closed: out[i] = exprcore::evaluate_real(f.at_zero, v); break;
        case FlowKind::Rational: out[i] = exprcore::evaluate_real(f.num, v) / exprcore::evaluate_real(f.den, v); break;
        case FlowKind::Log:
            out[i] = exprcore::evaluate_real(f.at_zero, v) +
                     exprcore::evaluate_real(f.coef, v) * std::log(exprcore::evaluate_real(f.arg, v));
            break;
        case FlowKind::Numeric:
            if (!numeric) {
                if (xv == 0.0) {
                    numeric = tilde;
                } else {
                    CompiledRhs rhs(ft, v);
                    auto sol = numlab::solve_ivp(
                        [&](double t, const numlab::State& z, numlab::State& dz) { rhs(t, z, dz); }, tilde, xv, 0.0,
                        flow_ivp_options());
                    numeric = sol.final_state();
                }
            }
            out[i] = (*numeric)[i];
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------- uniform solution

LogForm LogForm::normalized(const std::string& var) const {
    LogForm r = *this;
    std::vector<Term> constant;
    for (const auto& t : arg.terms())
        if (!term_has(t, var)) constant.push_back(t);
    if (constant.size() != 1) return r;
    const Term& k = constant.front();
    if (!k.c.is_one() || !k.m.empty() || !k.phase.is_zero()) return r;
    r.c0 = c0 + coef * Expr::from_poly(k.rate);
    r.arg = arg * exprcore::exp(-Expr::from_poly(k.rate));
    return r;
}

double LogForm::evaluate(const std::map<std::string, double>& values) const {
    return exprcore::evaluate_real(c0, values) +
           exprcore::evaluate_real(coef, values) * std::log(exprcore::evaluate_real(arg, values));
}

std::string LogForm::to_string() const {
    std::string s;
    if (!c0.is_zero()) s = exprcore::print(c0) + " + ";
    if (coef == Expr(1)) return s + "ln(" + exprcore::print(arg) + ")";
    return s + "(" + exprcore::print(coef) + ")*ln(" + exprcore::print(arg) + ")";
}

bool operator==(const LogForm& a, const LogForm& b) { return a.c0 == b.c0 && a.coef == b.coef && a.arg == b.arg; }

double UniformSolution::operator()(double xv, const std::map<std::string, double>& values) const {
    std::map<std::string, double> v = values;
    v[var] = xv;
    v[flows.x] = xv;
    if (binder) binder(xv, v);
    if (symbolic) return exprcore::evaluate_real(*symbolic, v);
    if (log_form) return log_form->evaluate(v);
    auto u0 = flows.at_zero(xv, v);
    for (size_t i = 0; i < u0.size(); ++i) v[flows.unknowns[i]] = u0[i];
    return exprcore::evaluate_real(special, v);
}

std::vector<double> UniformSolution::on_grid(const std::vector<double>& xs,
                                             const std::map<std::string, double>& values) const {
    std::vector<double> out;
    out.reserve(xs.size());
    if (xs.empty()) return out;
    bool single_run = !symbolic && !log_form && flows.any_numeric() && autonomous(flows.ft) &&
                      std::all_of(xs.begin(), xs.end(), [](double v) { return v >= 0.0; });
    if (!single_run) {
        for (double xv : xs) out.push_back((*this)(xv, values));
        return out;
    }
    // dZ/ds = -F(Z), Z(0) = tilde gives the mu = 0 values for start point x = s.
    const size_t n = flows.unknowns.size();
    std::map<std::string, double> v = values;
    numlab::State z0(n);
    for (size_t i = 0; i < n; ++i) {
        auto it = v.find(flows.tildes[i]);
        if (it == v.end()) throw std::invalid_argument("no value for " + flows.tildes[i]);
        z0[i] = it->second;
    }
    CompiledRhs rhs(flows.ft, v);
    double xmax = *std::max_element(xs.begin(), xs.end());
    std::optional<numlab::IVPSolution> traj;
    if (xmax > 0.0)
        traj = numlab::solve_ivp(
            [&](double, const numlab::State& z, numlab::State& dz) {
                rhs(0.0, z, dz);
                for (auto& d : dz) d = -d;
            },
            z0, 0.0, xmax, flow_ivp_options());
    std::vector<std::string> slots{var};
    std::set<std::string> names = special.symbols();
    for (const auto& s : names)
        if (s != var && s != "pi") slots.push_back(s);
    Evaluator ev(special, slots);
    std::vector<double> buf(slots.size());
    for (double xv : xs) {
        std::map<std::string, double> w = v;
        w[var] = xv;
        w[flows.x] = xv;
        if (binder) binder(xv, w);
        numlab::State z = traj && xv > 0.0 ? traj->at(xv) : z0;
        for (size_t i = 0; i < n; ++i) {
            const Flow& f = flows.flows[i];
            if (f.kind == FlowKind::Numeric) w[flows.unknowns[i]] = z[i];
        }
        bool need_closed = std::any_of(flows.flows.begin(), flows.flows.end(),
                                       [](const Flow& f) { return f.kind != FlowKind::Numeric; });
        if (need_closed) {
            auto u0 = flows.at_zero(xv, w);
            for (size_t i = 0; i < n; ++i)
                if (flows.flows[i].kind != FlowKind::Numeric) w[flows.unknowns[i]] = u0[i];
        }
        for (size_t k = 0; k < slots.size(); ++k) {
            auto it = w.find(slots[k]);
            if (it == w.end()) throw std::invalid_argument("no value for symbol " + slots[k]);
            buf[k] = it->second;
        }
        out.push_back(ev(buf.data()).real());
    }
    return out;
}

UniformSolution assemble_uniform(const PaintedSeries& ps, const ConstantFlows& flows, const AssembleOptions& opts) {
    UniformSolution us;
    us.var = ps.series.var;
    us.flows = flows;
    std::map<std::string, Expr> fix;
    for (const auto& [c, o] : ps.series.constants)
        if (std::find(flows.unknowns.begin(), flows.unknowns.end(), c) == flows.unknowns.end()) fix[c] = Expr();
    for (const auto& [c, e] : opts.fixed) fix[c] = e;
    fix[ps.mu] = Expr();
    us.special = exprcore::substitute(series_sum(ps.series.orders, ps.series.param), fix);

    std::ostringstream prov;
    prov << "special: " << exprcore::print(us.special) << "; flows:";
    static const char* kind_names[] = {"closed", "rational", "log", "numeric"};
    for (size_t i = 0; i < flows.unknowns.size(); ++i)
        prov << " " << flows.unknowns[i] << "=" << kind_names[static_cast<int>(flows.flows[i].kind)];
    us.provenance = prov.str();

    const size_t n = flows.unknowns.size();
    std::map<std::string, Expr> closed;
    std::vector<size_t> logs;
    bool other = false;
    for (size_t i = 0; i < n; ++i) {
        if (!us.special.depends_on(flows.unknowns[i])) continue;
        switch (flows.flows[i].kind) {
        case FlowKind::Closed: closed[flows.unknowns[i]] = flows.flows[i].at_zero; break;
        case FlowKind::Log: logs.push_back(i); break;
        default: other = true;
        }
    }
    if (other || logs.size() > 1) return us;
    try {
        if (logs.empty()) {
            us.symbolic = exprcore::substitute(us.special, closed);
            return us;
        }
        const size_t li = logs.front();
        const std::string& u = flows.unknowns[li];
        Expr slope = exprcore::diff(us.special, u);
        if (slope.depends_on(u)) return us;
        Expr rest = exprcore::substitute(us.special, u, Expr());
        const Flow& f = flows.flows[li];
        LogForm lf;
        lf.c0 = exprcore::substitute(rest + slope * f.at_zero, closed);
        lf.coef = exprcore::substitute(slope * f.coef, closed);
        lf.arg = exprcore::substitute(f.arg, closed);
        us.log_form = lf.normalized(flows.x);
    } catch (const OutOfClass&) {
        us.symbolic.reset();
        us.log_form.reset();
    }
    return us;
}

// ---------------------------------------------------------------- CGO comparison

CGOResult cgo_rg_equation(const Expr& split_series, const std::string& var, const std::string& x0,
                          const std::vector<std::string>& constants, const std::string& param, int k, int n_derivs,
                          const std::vector<std::string>& split_params) {
    CGOResult res;
    const Expr eps = Expr::sym(param);
    const exprcore::DiffContext dx{var, {}, {}};
    for (const auto& c : constants) res.unknowns.push_back(c + "'");
    for (int d = 0; d <= n_derivs; ++d) {
        Expr y = exprcore::diff_n(split_series, dx, d);
        // A' counted as param * A'
        Expr row = exprcore::diff(y, x0);
        for (const auto& c : constants) row += eps * Expr::sym(c + "'") * exprcore::diff(y, c);
        row = exprcore::substitute(row, var, Expr::sym(x0));
        row = exprcore::truncate(row, param, k);
        std::map<std::string, Expr> back;
        for (const auto& c : constants) back[c + "'"] = Expr::sym(c + "'") * Expr::sym(param).pow(-1);
        res.equations.push_back(exprcore::substitute(row, back));
    }
    const size_t n = constants.size();
    std::vector<std::vector<Expr>> a;
    std::vector<Expr> b;
    for (const auto& e : res.equations) {
        std::vector<Expr> row(n);
        std::map<std::string, Expr> zero;
        for (size_t i = 0; i < n; ++i) {
            row[i] = exprcore::diff(e, res.unknowns[i]);
            zero[res.unknowns[i]] = Expr();
        }
        a.push_back(std::move(row));
        b.push_back(-exprcore::substitute(e, zero));
    }
    auto sol = exprcore::solve_linear(a, b);
    std::ostringstream diag;
    if (!sol.consistent()) {
        res.inconsistent = true;
        diag << "inconsistent: equation " << sol.inconsistent_rows.front() << " cannot be satisfied";
    } else if (!sol.unique()) {
        res.underdetermined = true;
        bool split_free = false;
        for (const auto& e : res.equations)
            if (expr_has_any(e, split_params)) split_free = true;
        diag << (split_free ? "doubly underdetermined: " : "underdetermined: ") << res.equations.size()
             << " equation(s) for " << n << " unknown(s)";
        if (split_free) diag << " with a free splitting parameter";
    } else {
        for (size_t i = 0; i < n; ++i) res.solution[res.unknowns[i]] = sol.x[i];
        diag << "determined";
    }
    res.diagnostic = diag.str();
    return res;
}

// ---------------------------------------------------------------- printing

std::optional<Q> leading_order(const Expr& rhs, const std::string& param) {
    std::optional<Q> best;
    for (const auto& t : rhs.terms()) {
        Q e = exprcore::mono_exp(t.m, param);
        if (!best || e < *best) best = e;
    }
    return best;
}

namespace {

Q q_gcd(const Q& a, const Q& b) {
    mpz_class num, den;
    mpz_gcd(num.get_mpz_t(), a.get_num_mpz_t(), b.get_num_mpz_t());
    mpz_lcm(den.get_mpz_t(), a.get_den_mpz_t(), b.get_den_mpz_t());
    return Q(num, den);
}

std::string compact(std::string s) {
    std::string out;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == ' ' && i + 2 < s.size() && (s[i + 1] == '+' || s[i + 1] == '-') && s[i + 2] == ' ') {
            out += s[i + 1];
            i += 2;
        } else {
            out += s[i];
        }
    }
    return out;
}

struct Item {
    Expr e;
    bool trig;
    int degree;
    int parts;
    std::string text;
};

} // namespace

std::string format_equation(const std::string& lhs, const Expr& rhs, const std::set<std::string>& unknowns) {
    if (rhs.is_zero()) return lhs + " = 0";
    const auto& terms = rhs.terms();

    // common monomial (exponent minimum over terms, absent counts as 0)
    std::set<std::string> syms;
    for (const auto& t : terms)
        for (const auto& [s, e] : t.m) syms.insert(s);
    Monomial common;
    for (const auto& s : syms) {
        int lo = exprcore::mono_exp(terms.front().m, s);
        for (const auto& t : terms) lo = std::min(lo, exprcore::mono_exp(t.m, s));
        if (lo != 0) common.emplace_back(s, lo);
    }
    Monomial pm, um;
    for (const auto& [s, e] : common) (unknowns.count(s) ? um : pm).emplace_back(s, e);

    // rational content on the real (cos/sin) coefficients
    Q content = 0;
    for (const auto& t : terms) {
        Q w = t.phase.is_zero() ? t.c.re() : Q(2 * t.c.re());
        Q v = t.phase.is_zero() ? Q(0) : Q(2 * t.c.im());
        for (const Q& z : {w, v})
            if (sgn(z) != 0) content = sgn(content) == 0 ? Q(abs(z)) : q_gcd(content, abs(z));
    }
    if (sgn(content) == 0) content = 1;

    Expr rest = rhs * Expr(Term{QI(Q(1 / content)), exprcore::mono_inv(common), {}, {}});

    // items: real groups of conjugate terms
    std::vector<Item> items;
    std::vector<bool> used(rest.terms().size(), false);
    const auto& rt = rest.terms();
    for (size_t i = 0; i < rt.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        Expr g = term_expr(rt[i]);
        bool trig = !rt[i].phase.is_zero();
        int parts = trig ? (sgn(rt[i].c.re()) != 0) + (sgn(rt[i].c.im()) != 0) : 1;
        if (trig)
            for (size_t j = i + 1; j < rt.size(); ++j)
                if (!used[j] && exprcore::mono_cmp(rt[j].m, rt[i].m) == 0 && rt[j].rate == rt[i].rate &&
                    rt[j].phase == -rt[i].phase) {
                    used[j] = true;
                    g += term_expr(rt[j]);
                }
        items.push_back({g, trig || !rt[i].rate.is_zero(), exprcore::mono_degree(rt[i].m), parts,
                         compact(exprcore::print(g))});
    }
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.trig != b.trig) return a.trig;
        return a.degree > b.degree;
    });
    if (!items.empty() && items.front().text[0] == '-') {
        content = -content;
        for (auto& it : items) it.text = compact(exprcore::print(-it.e));
    }

    std::string pstr = exprcore::mono_to_string(pm);
    std::string ustr = exprcore::mono_to_string(um);
    bool single = items.size() == 1 && items.front().parts == 1;
    if (single) {
        std::string f = pstr;
        auto add = [&](const std::string& s) {
            if (s.empty() || s == "1") return;
            f += (f.empty() ? "" : "*") + s;
        };
        add(ustr);
        add(items.front().text);
        return lhs + " = " + exprcore::format_product(content, f);
    }
    std::string out = lhs + " = ";
    if (sgn(content) < 0) out += "-";
    std::string pf = exprcore::format_product(abs(content), pstr);
    if (pf != "1") {
        bool bare = pf.find_first_of("*/") == std::string::npos;
        out += bare ? pf : "(" + pf + ")";
        out += "*";
    }
    std::string sum;
    for (size_t i = 0; i < items.size(); ++i) {
        const std::string& t = items[i].text;
        if (i > 0 && t[0] != '-') sum += "+";
        sum += t;
    }
    out += "(" + sum + ")";
    if (!ustr.empty()) out += "*" + ustr;
    return out;
}

} // namespace hsym::hiddenscale
