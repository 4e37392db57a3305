#include "hsym/exprcore/expr.hpp"

#include <algorithm>
#include <cmath>

namespace hsym::exprcore {

namespace {

// Fold integer multiples of pi/2 out of the phase into the coefficient.
void fold_pi(Term& t) {
    if (t.rate.contains("pi")) {
        for (const auto& [m, c] : t.rate.entries())
            if (m.size() == 1 && m[0].first == "pi" && m[0].second == 1)
                throw OutOfClass("pi in a real exponent");
    }
    std::vector<Poly::Entry> keep;
    bool changed = false;
    for (const auto& [m, c] : t.phase.entries()) {
        if (m.size() == 1 && m[0].first == "pi" && m[0].second == 1) {
            Q k = c * 2;
            if (k.get_den() != 1) throw OutOfClass("phase multiple of pi that is not a multiple of pi/2");
            mpz_class r = k.get_num() % 4;
            if (r < 0) r += 4;
            long quarter = r.get_si();
            static const QI units[4] = {QI(1), QI(Q(0), Q(1)), QI(-1), QI(Q(0), Q(-1))};
            t.c *= units[quarter];
            changed = true;
        } else {
            keep.emplace_back(m, c);
        }
    }
    if (changed) t.phase = Poly::from_entries(std::move(keep));
}

Poly poly_partial(const Poly& p, const std::string& s) {
    std::vector<Poly::Entry> out;
    for (const auto& [m, c] : p.entries()) {
        int e = mono_exp(m, s);
        if (e != 0) out.emplace_back(mono_with(m, s, e - 1), c * e);
    }
    return Poly::from_entries(std::move(out));
}

Expr poly_to_expr(const Poly& p) { return Expr::from_poly(p); }

// Partial derivative of a single term with respect to symbol s.
Expr term_partial(const Term& t, const std::string& s) {
    Expr r;
    int e = mono_exp(t.m, s);
    if (e != 0) {
        Term d = t;
        d.c *= QI(e);
        d.m = mono_with(t.m, s, e - 1);
        r += Expr(d);
    }
    Poly dr = poly_partial(t.rate, s);
    Poly dp = poly_partial(t.phase, s);
    if (!dr.is_zero() || !dp.is_zero()) {
        Expr factor = poly_to_expr(dr) + Expr::imag_unit() * poly_to_expr(dp);
        r += Expr(t) * factor;
    }
    return r;
}

void term_symbols(const Term& t, std::set<std::string>& out) {
    for (const auto& [s, e] : t.m) out.insert(s);
    t.rate.collect_symbols(out);
    t.phase.collect_symbols(out);
}

std::string strip_primes(const std::string& s) {
    size_t n = s.size();
    while (n > 0 && s[n - 1] == '\'') --n;
    return s.substr(0, n);
}

Expr symbol_derivative(const std::string& s, const DiffContext& ctx) {
    if (s == ctx.var) return Expr(1);
    auto it = ctx.rules.find(s);
    if (it != ctx.rules.end()) return it->second;
    if (ctx.tags.count(s) || ctx.tags.count(strip_primes(s))) return Expr::sym(s + "'");
    return Expr();
}

Expr poly_substitute(const Poly& p, const std::map<std::string, Expr>& repl) {
    Expr r;
    for (const auto& [m, c] : p.entries()) {
        Expr t(c);
        Monomial rest;
        for (const auto& [s, e] : m) {
            auto it = repl.find(s);
            if (it == repl.end()) rest.emplace_back(s, e);
            else t *= it->second.pow(e);
        }
        Term base{QI(1), rest, {}, {}};
        r += t * Expr(base);
    }
    return r;
}

bool touches(const Term& t, const std::map<std::string, Expr>& repl) {
    std::set<std::string> syms;
    term_symbols(t, syms);
    for (const auto& s : syms)
        if (repl.count(s)) return true;
    return false;
}

template <class Lookup>
std::complex<double> eval_generic(const Expr& e, Lookup&& lookup) {
    auto poly_val = [&](const Poly& p) {
        double v = 0;
        for (const auto& [m, c] : p.entries()) {
            double x = q_to_double(c);
            for (const auto& [s, k] : m) x *= std::pow(lookup(s), k);
            v += x;
        }
        return v;
    };
    std::complex<double> sum = 0;
    for (const auto& t : e.terms()) {
        std::complex<double> x = t.c.to_complex();
        for (const auto& [s, k] : t.m) x *= std::pow(lookup(s), k);
        double re = t.rate.is_zero() ? 0.0 : poly_val(t.rate);
        double ph = t.phase.is_zero() ? 0.0 : poly_val(t.phase);
        if (re != 0.0 || ph != 0.0) x *= std::exp(std::complex<double>(re, ph));
        sum += x;
    }
    return sum;
}

} // namespace

int term_key_cmp(const Term& a, const Term& b) {
    int c = mono_cmp(a.m, b.m);
    if (c != 0) return c;
    c = poly_cmp(a.rate, b.rate);
    if (c != 0) return c;
    return poly_cmp(a.phase, b.phase);
}

Expr::Expr(long n) {
    if (n != 0) terms_.push_back(Term{QI(n), {}, {}, {}});
}

Expr::Expr(const Q& q) {
    if (sgn(q) != 0) terms_.push_back(Term{QI(q), {}, {}, {}});
}

Expr::Expr(const QI& c) {
    if (!c.is_zero()) terms_.push_back(Term{c, {}, {}, {}});
}

Expr::Expr(Term t) {
    terms_.push_back(std::move(t));
    normalize();
}

Expr Expr::sym(const std::string& name) { return Expr(Term{QI(1), Monomial{{name, 1}}, {}, {}}); }

Expr Expr::imag_unit() { return Expr(QI::imag_unit()); }

Expr Expr::from_terms(std::vector<Term> terms) {
    Expr e;
    e.terms_ = std::move(terms);
    e.normalize();
    return e;
}

Expr Expr::from_poly(const Poly& p) {
    Expr e;
    for (const auto& [m, c] : p.entries()) e.terms_.push_back(Term{QI(c), m, {}, {}});
    e.normalize();
    return e;
}

void Expr::normalize() {
    for (auto& t : terms_) fold_pi(t);
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return term_key_cmp(a, b) < 0; });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& t : terms_) {
        if (!out.empty() && term_key_cmp(out.back(), t) == 0) out.back().c += t.c;
        else out.push_back(std::move(t));
    }
    terms_.clear();
    for (auto& t : out)
        if (!t.c.is_zero()) terms_.push_back(std::move(t));
}

bool Expr::is_number() const {
    return terms_.empty() ||
           (terms_.size() == 1 && terms_[0].m.empty() && terms_[0].rate.is_zero() && terms_[0].phase.is_zero());
}

std::optional<QI> Expr::as_number() const {
    if (!is_number()) return std::nullopt;
    if (terms_.empty()) return QI(0);
    return terms_[0].c;
}

std::optional<Poly> Expr::as_poly() const {
    std::vector<Poly::Entry> e;
    for (const auto& t : terms_) {
        if (!t.rate.is_zero() || !t.phase.is_zero() || !t.c.is_real()) return std::nullopt;
        e.emplace_back(t.m, t.c.re());
    }
    return Poly::from_entries(std::move(e));
}

std::set<std::string> Expr::symbols() const {
    std::set<std::string> s;
    for (const auto& t : terms_) term_symbols(t, s);
    return s;
}

bool Expr::depends_on(const std::string& s) const {
    for (const auto& t : terms_)
        if (mono_exp(t.m, s) != 0 || t.rate.contains(s) || t.phase.contains(s)) return true;
    return false;
}

Expr Expr::operator-() const {
    Expr r = *this;
    for (auto& t : r.terms_) t.c = -t.c;
    return r;
}

Expr& Expr::operator+=(const Expr& o) {
    if (o.terms_.empty()) return *this;
    std::vector<Term> out;
    out.reserve(terms_.size() + o.terms_.size());
    size_t i = 0, j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
        if (j == o.terms_.size()) {
            out.push_back(std::move(terms_[i++]));
            continue;
        }
        if (i == terms_.size()) {
            out.push_back(o.terms_[j++]);
            continue;
        }
        int c = term_key_cmp(terms_[i], o.terms_[j]);
        if (c < 0) out.push_back(std::move(terms_[i++]));
        else if (c > 0) out.push_back(o.terms_[j++]);
        else {
            Term t = std::move(terms_[i++]);
            t.c += o.terms_[j++].c;
            if (!t.c.is_zero()) out.push_back(std::move(t));
        }
    }
    terms_ = std::move(out);
    return *this;
}

Expr& Expr::operator-=(const Expr& o) { return *this += -o; }

Expr& Expr::operator*=(const Expr& o) {
    *this = *this * o;
    return *this;
}

Expr operator*(const Expr& a, const Expr& b) {
    Expr r;
    if (a.terms_.empty() || b.terms_.empty()) return r;
    r.terms_.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& x : a.terms_)
        for (const auto& y : b.terms_) {
            Term t;
            t.c = x.c * y.c;
            t.m = mono_mul(x.m, y.m);
            t.rate = y.rate.is_zero() ? x.rate : (x.rate.is_zero() ? y.rate : x.rate + y.rate);
            t.phase = y.phase.is_zero() ? x.phase : (x.phase.is_zero() ? y.phase : x.phase + y.phase);
            r.terms_.push_back(std::move(t));
        }
    r.normalize();
    return r;
}

bool operator==(const Expr& a, const Expr& b) { return expr_cmp(a, b) == 0; }

int expr_cmp(const Expr& a, const Expr& b) {
    const auto& x = a.terms();
    const auto& y = b.terms();
    size_t n = std::min(x.size(), y.size());
    for (size_t i = 0; i < n; ++i) {
        int c = term_key_cmp(x[i], y[i]);
        if (c != 0) return c;
        c = cmp(x[i].c, y[i].c);
        if (c != 0) return c;
    }
    if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
    return 0;
}

Expr Expr::pow(int n) const {
    if (n < 0) return inverse().pow(-n);
    Expr result(1);
    Expr base = *this;
    while (n > 0) {
        if (n & 1) result = result * base;
        n >>= 1;
        if (n) base = base * base;
    }
    return result;
}

Expr Expr::inverse() const {
    if (terms_.size() != 1) throw OutOfClass("inverse of an expression that is not a single term");
    const Term& t = terms_[0];
    return Expr(Term{QI(1) / t.c, mono_inv(t.m), -t.rate, -t.phase});
}

Expr Expr::conj() const {
    Expr r;
    r.terms_.reserve(terms_.size());
    for (const auto& t : terms_) r.terms_.push_back(Term{t.c.conj(), t.m, t.rate, -t.phase});
    r.normalize();
    return r;
}

Expr Expr::real_part() const { return (*this + conj()) * Expr(make_q(1, 2)); }

Expr Expr::imag_part() const { return (*this - conj()) * Expr(QI(Q(0), make_q(-1, 2))); }

Expr exp(const Expr& arg) {
    std::vector<Poly::Entry> re, im;
    for (const auto& t : arg.terms()) {
        if (!t.rate.is_zero() || !t.phase.is_zero()) throw OutOfClass("exp of an exponential");
        if (sgn(t.c.re()) != 0) re.emplace_back(t.m, t.c.re());
        if (sgn(t.c.im()) != 0) im.emplace_back(t.m, t.c.im());
    }
    return Expr(Term{QI(1), {}, Poly::from_entries(std::move(re)), Poly::from_entries(std::move(im))});
}

Expr sin(const Expr& arg) {
    Expr ia = Expr::imag_unit() * arg;
    return (exp(ia) - exp(-ia)) * Expr(QI(Q(0), make_q(-1, 2)));
}

Expr cos(const Expr& arg) {
    Expr ia = Expr::imag_unit() * arg;
    return (exp(ia) + exp(-ia)) * Expr(make_q(1, 2));
}

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_zero()) throw std::domain_error("division by zero");
    return a * b.inverse();
}

Expr diff(const Expr& e, const std::string& var) { return diff(e, DiffContext{var, {}, {}}); }

Expr diff(const Expr& e, const DiffContext& ctx) {
    Expr r;
    std::map<std::string, Expr> cache;
    for (const auto& t : e.terms()) {
        std::set<std::string> syms;
        term_symbols(t, syms);
        for (const auto& s : syms) {
            auto it = cache.find(s);
            if (it == cache.end()) it = cache.emplace(s, symbol_derivative(s, ctx)).first;
            if (it->second.is_zero()) continue;
            r += term_partial(t, s) * it->second;
        }
    }
    return r;
}

Expr diff_n(const Expr& e, const DiffContext& ctx, int n) {
    Expr r = e;
    for (int k = 0; k < n; ++k) r = diff(r, ctx);
    return r;
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& repl) {
    if (repl.empty()) return e;
    Expr r;
    std::vector<Term> untouched;
    for (const auto& t : e.terms()) {
        if (!touches(t, repl)) {
            untouched.push_back(t);
            continue;
        }
        Expr x(t.c);
        Monomial rest;
        for (const auto& [s, k] : t.m) {
            auto it = repl.find(s);
            if (it == repl.end()) rest.emplace_back(s, k);
            else x *= it->second.pow(k);
        }
        x *= Expr(Term{QI(1), rest, {}, {}});
        if (!t.rate.is_zero() || !t.phase.is_zero()) {
            Expr arg = poly_substitute(t.rate, repl) + Expr::imag_unit() * poly_substitute(t.phase, repl);
            x *= exp(arg);
        }
        r += x;
    }
    return r + Expr::from_terms(std::move(untouched));
}

Expr substitute(const Expr& e, const std::string& sym, const Expr& repl) {
    return substitute(e, std::map<std::string, Expr>{{sym, repl}});
}

std::complex<double> evaluate(const Expr& e, const std::map<std::string, double>& values) {
    return eval_generic(e, [&](const std::string& s) {
        auto it = values.find(s);
        if (it != values.end()) return it->second;
        if (s == "pi") return M_PI;
        throw std::invalid_argument("unbound symbol in evaluation: " + s);
    });
}

double evaluate_real(const Expr& e, const std::map<std::string, double>& values) { return evaluate(e, values).real(); }

Evaluator::Evaluator(const Expr& e, const std::vector<std::string>& slots) {
    auto slot_of = [&](const std::string& s) -> int {
        for (size_t i = 0; i < slots.size(); ++i)
            if (slots[i] == s) return static_cast<int>(i);
        if (s == "pi") return -1;
        throw std::invalid_argument("unbound symbol in evaluator: " + s);
    };
    auto compile_poly = [&](const Poly& p) {
        std::vector<PolyTerm> out;
        for (const auto& [m, c] : p.entries()) {
            PolyTerm pt{q_to_double(c), {}};
            for (const auto& [s, k] : m) {
                int sl = slot_of(s);
                if (sl < 0) pt.c *= std::pow(M_PI, k);
                else pt.f.push_back({sl, k});
            }
            out.push_back(std::move(pt));
        }
        return out;
    };
    for (const auto& t : e.terms()) {
        CTerm ct{t.c.to_complex(), {}, compile_poly(t.rate), compile_poly(t.phase)};
        for (const auto& [s, k] : t.m) {
            int sl = slot_of(s);
            if (sl < 0) ct.c *= std::pow(M_PI, k);
            else ct.m.push_back({sl, k});
        }
        terms_.push_back(std::move(ct));
    }
}

std::complex<double> Evaluator::operator()(const double* v) const {
    auto ipow = [](double x, int k) {
        if (k == 1) return x;
        if (k == 2) return x * x;
        return std::pow(x, k);
    };
    auto poly_val = [&](const std::vector<PolyTerm>& p) {
        double s = 0;
        for (const auto& pt : p) {
            double x = pt.c;
            for (const auto& f : pt.f) x *= ipow(v[f.slot], f.power);
            s += x;
        }
        return s;
    };
    std::complex<double> sum = 0;
    for (const auto& t : terms_) {
        std::complex<double> x = t.c;
        for (const auto& f : t.m) x *= ipow(v[f.slot], f.power);
        if (!t.rate.empty() || !t.phase.empty()) x *= std::exp(std::complex<double>(poly_val(t.rate), poly_val(t.phase)));
        sum += x;
    }
    return sum;
}

DivergenceSplit classify_divergent(const Expr& e, const std::string& v) {
    return classify_divergent(e, v, DivergencePredicate{});
}

DivergenceSplit classify_divergent(const Expr& e, const std::string& v, const DivergencePredicate& pred) {
    std::vector<Term> div, conv;
    for (const auto& t : e.terms()) {
        std::optional<bool> d;
        if (pred) d = pred(t);
        bool is_div = d ? *d : mono_exp(t.m, v) >= 1;
        (is_div ? div : conv).push_back(t);
    }
    return {Expr::from_terms(std::move(div)), Expr::from_terms(std::move(conv))};
}

} // namespace hsym::exprcore
