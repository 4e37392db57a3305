#include "hsym/pertseries.hpp"

#include "hsym/exprcore/text.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hsym::pertseries {

using exprcore::Monomial;
using exprcore::OutOfClass;
using exprcore::Poly;
using exprcore::Term;

namespace {

using QPoly = std::vector<Q>; // low to high

void trim(QPoly& p) {
    while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}

QPoly poly_rem(QPoly a, const QPoly& b) {
    trim(a);
    while (a.size() >= b.size() && !a.empty()) {
        Q f = a.back() / b.back();
        size_t shift = a.size() - b.size();
        for (size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
        a.pop_back();
        trim(a);
    }
    return a;
}

QPoly poly_gcd(QPoly a, QPoly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        QPoly r = poly_rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        Q lead = a.back();
        for (auto& c : a) c /= lead;
    }
    return a;
}

QPoly poly_div(QPoly a, const QPoly& b) {
    trim(a);
    if (a.size() < b.size()) return {};
    QPoly q(a.size() - b.size() + 1);
    while (a.size() >= b.size() && !a.empty()) {
        Q f = a.back() / b.back();
        size_t shift = a.size() - b.size();
        q[shift] = f;
        for (size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
        a.pop_back();
        trim(a);
    }
    return q;
}

QPoly derivative(const QPoly& p) {
    QPoly d;
    for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
    return d;
}

std::vector<std::complex<double>> durand_kerner(const QPoly& p) {
    const size_t n = p.size() - 1;
    std::vector<std::complex<double>> a(p.size());
    for (size_t i = 0; i < p.size(); ++i) a[i] = exprcore::q_to_double(p[i]) / exprcore::q_to_double(p.back());
    auto eval = [&](std::complex<double> z) {
        std::complex<double> v = 0;
        for (size_t i = p.size(); i-- > 0;) v = v * z + a[i];
        return v;
    };
    std::vector<std::complex<double>> z(n);
    const std::complex<double> seed(0.4, 0.9);
    for (size_t i = 0; i < n; ++i) z[i] = std::pow(seed, static_cast<double>(i));
    for (int it = 0; it < 2000; ++it) {
        double change = 0;
        for (size_t i = 0; i < n; ++i) {
            std::complex<double> den = 1;
            for (size_t j = 0; j < n; ++j)
                if (j != i) den *= z[i] - z[j];
            std::complex<double> dz = eval(z[i]) / den;
            z[i] -= dz;
            change = std::max(change, std::abs(dz));
        }
        if (change < 1e-15) break;
    }
    return z;
}

Q snap(double x, long max_den) {
    // Continued-fraction convergents up to the denominator bound.
    long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double v = x;
    Q best(0);
    for (int i = 0; i < 64; ++i) {
        double fl = std::floor(v);
        long a = static_cast<long>(fl);
        long h2 = a * h1 + h0, k2 = a * k1 + k0;
        if (k2 > max_den) break;
        best = Q(h2, k2);
        best.canonicalize();
        if (std::abs(x - static_cast<double>(h2) / static_cast<double>(k2)) < 1e-12) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if (v - fl < 1e-14) break;
        v = 1.0 / (v - fl);
    }
    return best;
}

QI eval_qpoly(const QPoly& p, const QI& z) {
    QI v(0);
    for (size_t i = p.size(); i-- > 0;) v = v * z + QI(p[i]);
    return v;
}

Q binom(int n, int k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Q(r);
}

Expr exp_lin(const QI& lambda, const std::string& var) {
    Poly rate = Poly::symbol(var).scaled(lambda.re());
    Poly phase = Poly::symbol(var).scaled(lambda.im());
    return Expr(Term{QI(1), {}, rate, phase});
}

// Frequency of a term in var: coefficient of var in rate + i * coefficient in phase.
QI frequency(const Term& t, const std::string& var) {
    QI lam(0);
    auto pick = [&](const Poly& p, bool imag) {
        for (const auto& [m, c] : p.entries()) {
            if (exprcore::mono_exp(m, var) == 0) continue;
            if (m.size() != 1 || m[0].second != 1)
                throw OutOfClass("forcing frequency in " + var + " is not a rational number");
            lam += imag ? QI(Q(0), c) : QI(c);
        }
    };
    pick(t.rate, false);
    pick(t.phase, true);
    return lam;
}

struct QICmp {
    bool operator()(const QI& a, const QI& b) const { return exprcore::cmp(a, b) < 0; }
};

Expr drop_terms(const Expr& e, const std::set<std::string>& syms) {
    if (syms.empty()) return e;
    std::vector<Term> keep;
    for (const auto& t : e.terms()) {
        bool hit = false;
        for (const auto& s : syms)
            if (exprcore::mono_exp(t.m, s) != 0 || t.rate.contains(s) || t.phase.contains(s)) hit = true;
        if (!hit) keep.push_back(t);
    }
    return Expr::from_terms(std::move(keep));
}

std::vector<std::string> default_names(int order, size_t n) {
    std::vector<std::string> names;
    for (size_t i = 0; i < n; ++i) {
        if (order == 0) names.push_back(std::string(1, static_cast<char>('A' + i)));
        else if (order == 1) names.push_back("c" + std::to_string(i + 1));
        else names.push_back("c" + std::to_string(order) + "_" + std::to_string(i + 1));
    }
    return names;
}

int max_derivative_in(const Expr& e, const std::string& dep) {
    int best = -1;
    for (const auto& s : e.symbols()) {
        if (s.compare(0, dep.size(), dep) != 0) continue;
        std::string rest = s.substr(dep.size());
        if (rest.find_first_not_of('\'') != std::string::npos) continue;
        best = std::max(best, static_cast<int>(rest.size()));
    }
    return best;
}

} // namespace

Expr LinearOperator::apply(const Expr& y) const {
    Expr r;
    Expr d = y;
    for (size_t n = 0; n < c.size(); ++n) {
        if (n > 0) d = exprcore::diff(d, var);
        if (sgn(c[n]) != 0) r += d * Expr(c[n]);
    }
    return r;
}

QI LinearOperator::char_poly(const QI& z, int k) const {
    QI v(0);
    for (size_t n = c.size(); n-- > static_cast<size_t>(k);) {
        Q fall = 1;
        for (int i = 0; i < k; ++i) fall *= static_cast<long>(n) - i;
        v = v * z + QI(c[n] * fall);
    }
    return v;
}

std::vector<Root> characteristic_roots(const LinearOperator& L, long max_den) {
    QPoly p = L.c;
    trim(p);
    if (p.size() <= 1) return {};
    QPoly g = poly_gcd(p, derivative(p));
    QPoly sq = g.size() > 1 ? poly_div(p, g) : p;
    std::vector<Root> roots;
    for (auto z : durand_kerner(sq)) {
        QI r(snap(z.real(), max_den), snap(z.imag(), max_den));
        if (!eval_qpoly(sq, r).is_zero())
            throw OutOfClass("characteristic root " + std::to_string(z.real()) + "+" + std::to_string(z.imag()) +
                             "i is not a Gaussian rational; supply a kernel template");
        int mult = 0;
        while (L.char_poly(r, mult).is_zero()) ++mult;
        roots.push_back({r, mult});
    }
    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
        int c = ::cmp(a.value.re(), b.value.re());
        if (c != 0) return c > 0;
        return ::cmp(a.value.im(), b.value.im()) < 0;
    });
    return roots;
}

std::vector<Expr> kernel_basis(const LinearOperator& L) {
    auto roots = characteristic_roots(L);
    int maxm = 0;
    for (const auto& r : roots) maxm = std::max(maxm, r.multiplicity);
    const Expr x = Expr::sym(L.var);
    std::vector<Expr> basis;
    for (int j = 0; j < maxm; ++j) {
        for (const auto& r : roots) {
            if (j >= r.multiplicity || sgn(r.value.im()) < 0) continue;
            Expr pre = x.pow(j) * exp_lin(QI(r.value.re()), L.var);
            if (r.value.is_real()) {
                basis.push_back(pre);
            } else {
                Expr bx = Expr(r.value.im()) * x;
                basis.push_back(pre * exprcore::cos(bx));
                basis.push_back(pre * exprcore::sin(bx));
            }
        }
    }
    return basis;
}

Complementary complementary_function(const LinearOperator& L, const std::vector<std::string>& names) {
    Complementary cf;
    cf.basis = kernel_basis(L);
    cf.constants = names.empty() ? default_names(1, cf.basis.size()) : names;
    if (cf.constants.size() != cf.basis.size())
        throw std::invalid_argument("expected " + std::to_string(cf.basis.size()) + " integration constants, got " +
                                    std::to_string(cf.constants.size()));
    for (size_t i = 0; i < cf.basis.size(); ++i) cf.solution += Expr::sym(cf.constants[i]) * cf.basis[i];
    return cf;
}

Expr particular_solution(const LinearOperator& L, const Expr& f) {
    const std::string& var = L.var;
    std::map<QI, std::map<int, std::vector<Term>>, QICmp> groups;
    for (const auto& t : f.terms()) {
        QI lam = frequency(t, var);
        int q = exprcore::mono_exp(t.m, var);
        if (q < 0) throw OutOfClass("negative power of " + var + " in forcing");
        Term g = t;
        g.m = exprcore::mono_with(t.m, var, 0);
        g.rate = t.rate.split(var).second;
        g.phase = t.phase.split(var).second;
        groups[lam][q].push_back(std::move(g));
    }
    const int order = L.differential_order();
    const Expr x = Expr::sym(var);
    Expr y;
    for (auto& [lam, gq] : groups) {
        int qmax = gq.rbegin()->first;
        int s = 0;
        while (s <= order && L.char_poly(lam, s).is_zero()) ++s;
        if (s > order) throw std::logic_error("zero operator in particular_solution");
        std::vector<QI> pk(order + 1);
        for (int k = 0; k <= order; ++k) pk[k] = L.char_poly(lam, k);
        std::vector<Expr> h(qmax + 1);
        for (int q = qmax; q >= 0; --q) {
            Expr rhs;
            auto it = gq.find(q);
            if (it != gq.end()) rhs = Expr::from_terms(it->second);
            for (int m = q + s + 1; m <= qmax + s; ++m) {
                int k = m - q;
                if (k > order || pk[k].is_zero() || h[m - s].is_zero()) continue;
                rhs -= h[m - s] * Expr(QI(binom(m, k)) * pk[k]);
            }
            h[q] = rhs * Expr(QI(1) / (QI(binom(q + s, s)) * pk[s]));
        }
        Expr e = exp_lin(lam, var);
        for (int q = 0; q <= qmax; ++q)
            if (!h[q].is_zero()) y += h[q] * x.pow(q + s) * e;
    }
    return y;
}

OrderSolution solve_order(const LinearOperator& L, const Expr& f, const OrderPolicy& policy) {
    Expr yp = particular_solution(L, f);
    if (L.apply(yp) != f) throw std::logic_error("particular solution fails verification: " + exprcore::print(f));
    OrderSolution out;
    switch (policy.mode) {
    case ConstantsMode::Particular:
        out.y = yp;
        break;
    case ConstantsMode::Fresh:
        if (policy.templ) {
            if (!L.apply(*policy.templ).is_zero())
                throw std::invalid_argument("kernel template does not solve the unperturbed operator");
            out.y = yp + *policy.templ;
            out.constants = policy.names;
        } else {
            auto cf = complementary_function(L, policy.names);
            out.y = yp + cf.solution;
            out.constants = cf.constants;
        }
        break;
    case ConstantsMode::ZeroICs: {
        auto basis = kernel_basis(L);
        const int n = static_cast<int>(basis.size());
        std::vector<std::vector<Expr>> m(n, std::vector<Expr>(n));
        std::vector<Expr> rhs(n);
        Expr d = yp;
        std::vector<Expr> db = basis;
        const std::map<std::string, Expr> at0{{L.var, Expr(0)}};
        for (int r = 0; r < n; ++r) {
            if (r > 0) {
                d = exprcore::diff(d, L.var);
                for (auto& b : db) b = exprcore::diff(b, L.var);
            }
            rhs[r] = -exprcore::substitute(d, at0);
            for (int i = 0; i < n; ++i) m[r][i] = exprcore::substitute(db[i], at0);
        }
        auto sol = exprcore::solve_linear(m, rhs);
        if (!sol.unique()) throw std::logic_error("singular Wronskian at the origin");
        out.y = yp;
        for (int i = 0; i < n; ++i) out.y += sol.x[i] * basis[i];
        break;
    }
    }
    return out;
}

std::string derivative_symbol(const std::string& dep, int n) { return dep + std::string(static_cast<size_t>(n), '\''); }

Split split_equation(const ODEProblem& p) {
    int maxd = max_derivative_in(p.equation, p.dep);
    if (maxd < 0) throw std::invalid_argument("equation does not involve " + p.dep);
    Split s;
    s.L.var = p.var;
    s.L.c.assign(maxd + 1, Q(0));
    std::map<std::string, int> dsym;
    for (int n = 0; n <= maxd; ++n) dsym[derivative_symbol(p.dep, n)] = n;
    Expr lin;
    const Expr eq0 = exprcore::expand_in(p.equation, p.param, 0)[0];
    for (const auto& t : eq0.terms()) {
        if (!t.c.is_real() || t.m.size() != 1 || t.m[0].second != 1 || !t.rate.is_zero() || !t.phase.is_zero())
            continue;
        auto it = dsym.find(t.m[0].first);
        if (it == dsym.end()) continue;
        s.L.c[it->second] += t.c.re();
        lin += Expr(t);
    }
    s.N = p.equation - lin;
    if (!exprcore::expand_in(s.N, p.param, 0)[0].is_zero())
        throw std::invalid_argument("the " + p.param + "^0 part of the equation must be linear, homogeneous and constant-coefficient");
    for (const auto& t : s.N.terms()) {
        for (const auto& [sym, e] : t.m)
            if (dsym.count(sym) && e < 0) throw std::invalid_argument("non-polynomial dependence on " + sym);
        for (const auto& [sym, n] : dsym)
            if (t.rate.contains(sym) || t.phase.contains(sym))
                throw std::invalid_argument("non-polynomial dependence on " + sym);
    }
    if (sgn(s.L.c.back()) == 0)
        throw std::invalid_argument("the unperturbed operator must have the full differential order");
    return s;
}

namespace {

Expr apply_n(const ODEProblem& p, const Split& s, const Expr& Y) {
    std::map<std::string, Expr> repl;
    Expr d = Y;
    for (int n = 0; n < static_cast<int>(s.L.c.size()); ++n) {
        if (n > 0) d = exprcore::diff(d, p.var);
        repl[derivative_symbol(p.dep, n)] = d;
    }
    return exprcore::substitute(s.N, repl);
}

} // namespace

Expr forcing_at(const ODEProblem& p, const Split& s, const std::vector<Expr>& lower, int j) {
    Expr Y;
    const Expr e = Expr::sym(p.param);
    for (int i = 0; i < j && i < static_cast<int>(lower.size()); ++i) Y += lower[i] * e.pow(i);
    Expr f = -exprcore::collect_order(apply_n(p, s, Y), p.param, j, j);
    return j >= 1 ? drop_terms(f, p.drop_in_forcing) : f;
}

std::vector<HierarchyLevel> expand_hierarchy(const ODEProblem& p, const std::vector<Expr>& solved) {
    Split s = split_equation(p);
    std::vector<HierarchyLevel> out;
    for (int j = 0; j <= static_cast<int>(solved.size()) && j <= p.order; ++j)
        out.push_back({s.L, forcing_at(p, s, solved, j)});
    return out;
}

Expr PerturbationSeries::sum() const {
    Expr r;
    const Expr e = Expr::sym(param);
    for (size_t j = 0; j < orders.size(); ++j) r += orders[j] * e.pow(static_cast<int>(j));
    return r;
}

std::vector<std::string> PerturbationSeries::constants_at(int order) const {
    std::vector<std::string> out;
    for (const auto& [n, o] : constants)
        if (o == order) out.push_back(n);
    return out;
}

PerturbationSeries build_bare_series(const ODEProblem& p) {
    Split s = split_equation(p);
    PerturbationSeries ser;
    ser.param = p.param;
    ser.var = p.var;

    OrderPolicy z = p.zeroth;
    if (z.mode != ConstantsMode::Fresh) throw std::invalid_argument("order 0 needs fresh constants");
    if (!z.templ && z.names.empty()) z.names = default_names(0, kernel_basis(s.L).size());
    auto y0 = solve_order(s.L, Expr(), z);
    if (!z.templ && static_cast<int>(y0.constants.size()) != s.L.differential_order())
        throw std::invalid_argument("order 0 must introduce as many constants as the differential order");
    ser.orders.push_back(y0.y);
    for (const auto& c : y0.constants) ser.constants.emplace_back(c, 0);

    for (int j = 1; j <= p.order; ++j) {
        Expr f = forcing_at(p, s, ser.orders, j);
        OrderPolicy pol;
        auto it = p.higher.find(j);
        if (it != p.higher.end()) pol = it->second;
        if (pol.mode == ConstantsMode::Fresh && !pol.templ && pol.names.empty())
            pol.names = default_names(j, kernel_basis(s.L).size());
        auto yj = solve_order(s.L, f, pol);
        ser.orders.push_back(yj.y);
        for (const auto& c : yj.constants) ser.constants.emplace_back(c, j);
    }
    for (const auto& r : residuals(p, ser))
        if (!r.is_zero()) throw std::logic_error("bare series residual is not zero: " + exprcore::print(r));
    return ser;
}

std::vector<Expr> residuals(const ODEProblem& p, const PerturbationSeries& ser) {
    Split s = split_equation(p);
    const int k = static_cast<int>(ser.orders.size()) - 1;
    auto nparts = exprcore::expand_in(apply_n(p, s, ser.sum()), p.param, k);
    std::vector<Expr> out;
    for (int j = 0; j <= k; ++j) {
        Expr nj = j >= 1 ? drop_terms(nparts[j], p.drop_in_forcing) : nparts[j];
        out.push_back(s.L.apply(ser.orders[j]) + nj);
    }
    return out;
}

} // namespace hsym::pertseries
