#include "hsym/exprcore/series.hpp"

#include "hsym/exprcore/text.hpp"

#include <stdexcept>

namespace hsym::exprcore {

namespace {

Poly poly_with_only(const Poly& p, const std::set<std::string>& syms, bool keep) {
    std::vector<Poly::Entry> out;
    for (const auto& [m, c] : p.entries()) {
        bool hit = false;
        for (const auto& [s, e] : m)
            if (syms.count(s)) hit = true;
        if (hit == keep) out.emplace_back(m, c);
    }
    return Poly::from_entries(std::move(out));
}

// Drop terms whose power of p exceeds `limit`.
Expr chop(const Expr& e, const std::string& p, int limit) {
    std::vector<Term> keep;
    for (const auto& t : e.terms())
        if (mono_exp(t.m, p) <= limit) keep.push_back(t);
    return Expr::from_terms(std::move(keep));
}

} // namespace

std::vector<Expr> expand_in(const Expr& e, const std::string& p, int order) {
    if (order < 0) throw std::invalid_argument("negative truncation order");
    std::vector<std::vector<Term>> buckets(order + 1);
    std::map<std::pair<std::string, std::string>, Expr> cache;
    for (const auto& t : e.terms()) {
        int a = mono_exp(t.m, p);
        if (a < 0) throw std::domain_error("negative power of " + p + " in series expansion");
        if (a > order) continue;
        auto [rp, r0] = t.rate.split(p);
        auto [ip, i0] = t.phase.split(p);
        Expr series(1);
        if (!rp.is_zero() || !ip.is_zero()) {
            for (const auto& pe : {rp, ip})
                for (const auto& [m, c] : pe.entries())
                    if (mono_exp(m, p) < 0) throw std::domain_error("negative power of " + p + " in an exponent");
            auto key = std::make_pair(to_string(rp), to_string(ip));
            auto it = cache.find(key);
            if (it == cache.end()) {
                Expr x = Expr::from_poly(rp) + Expr::imag_unit() * Expr::from_poly(ip);
                Expr s(1), pw(1);
                Q fact = 1;
                for (int n = 1; n <= order; ++n) {
                    pw = chop(pw * x, p, order);
                    if (pw.is_zero()) break;
                    fact *= n;
                    s += pw * Expr(Q(1) / fact);
                }
                it = cache.emplace(key, s).first;
            }
            series = it->second;
        }
        Term base{t.c, mono_with(t.m, p, 0), r0, i0};
        Expr prod = Expr(base) * series;
        for (const auto& st : prod.terms()) {
            int j = mono_exp(st.m, p) + a;
            if (j > order) continue;
            Term u = st;
            u.m = mono_with(st.m, p, 0);
            buckets[j].push_back(std::move(u));
        }
    }
    std::vector<Expr> out;
    out.reserve(buckets.size());
    for (auto& b : buckets) out.push_back(Expr::from_terms(std::move(b)));
    return out;
}

Expr collect_order(const Expr& e, const std::string& p, int j, int trunc) {
    if (j > trunc)
        throw std::out_of_range("requested order " + std::to_string(j) + " exceeds truncation order " +
                                std::to_string(trunc));
    if (j < 0) return Expr();
    return expand_in(e, p, trunc)[j];
}

Expr collect_order(const Expr& e, const std::string& p, int j) { return collect_order(e, p, j, j); }

Expr truncate(const Expr& e, const std::string& p, int order) {
    auto parts = expand_in(e, p, order);
    Expr r;
    for (int j = 0; j <= order; ++j) r += parts[j] * Expr::sym(p).pow(j);
    return r;
}

int max_power(const Expr& e, const std::string& p) {
    int m = 0;
    for (const auto& t : e.terms()) {
        if (t.rate.contains(p) || t.phase.contains(p)) throw std::domain_error(p + " appears in an exponent");
        m = std::max(m, mono_exp(t.m, p));
    }
    return m;
}

bool operator<(const BasisKey& a, const BasisKey& b) {
    int c = mono_cmp(a.m, b.m);
    if (c != 0) return c < 0;
    c = poly_cmp(a.rate, b.rate);
    if (c != 0) return c < 0;
    return poly_cmp(a.phase, b.phase) < 0;
}

Expr basis_expr(const BasisKey& k) { return Expr(Term{QI(1), k.m, k.rate, k.phase}); }

std::string to_string(const BasisKey& k) { return print(basis_expr(k)); }

std::map<BasisKey, Expr> split_basis(const Expr& e, const std::set<std::string>& basis_syms) {
    std::map<BasisKey, std::vector<Term>> acc;
    for (const auto& t : e.terms()) {
        BasisKey k;
        Monomial rest;
        for (const auto& [s, x] : t.m) {
            if (basis_syms.count(s)) k.m.emplace_back(s, x);
            else rest.emplace_back(s, x);
        }
        k.rate = poly_with_only(t.rate, basis_syms, true);
        k.phase = poly_with_only(t.phase, basis_syms, true);
        acc[k].push_back(Term{t.c, rest, poly_with_only(t.rate, basis_syms, false),
                              poly_with_only(t.phase, basis_syms, false)});
    }
    std::map<BasisKey, Expr> out;
    for (auto& [k, v] : acc) {
        Expr c = Expr::from_terms(std::move(v));
        if (!c.is_zero()) out.emplace(k, std::move(c));
    }
    return out;
}

} // namespace hsym::exprcore
