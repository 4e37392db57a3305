#include "hsym/exprcore/poly.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace hsym::exprcore {

int mono_degree(const Monomial& m) {
    int d = 0;
    for (const auto& [s, e] : m) d += e;
    return d;
}

int mono_cmp(const Monomial& a, const Monomial& b) {
    int da = mono_degree(a), db = mono_degree(b);
    if (da != db) return da < db ? -1 : 1;
    size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) {
        int c = a[i].first.compare(b[i].first);
        if (c != 0) return c < 0 ? -1 : 1;
        if (a[i].second != b[i].second) return a[i].second > b[i].second ? -1 : 1;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            r.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            r.push_back(b[j++]);
        } else {
            int e = a[i].second + b[j].second;
            if (e != 0) r.emplace_back(a[i].first, e);
            ++i;
            ++j;
        }
    }
    return r;
}

Monomial mono_pow(const Monomial& a, int n) {
    if (n == 0) return {};
    Monomial r = a;
    for (auto& [s, e] : r) e *= n;
    return r;
}

Monomial mono_inv(const Monomial& a) { return mono_pow(a, -1); }

int mono_exp(const Monomial& m, const std::string& s) {
    for (const auto& [k, e] : m)
        if (k == s) return e;
    return 0;
}

Monomial mono_with(const Monomial& m, const std::string& s, int e) {
    Monomial r;
    bool placed = false;
    for (const auto& p : m) {
        if (p.first == s) {
            if (e != 0) r.emplace_back(s, e);
            placed = true;
        } else {
            if (!placed && s < p.first) {
                if (e != 0) r.emplace_back(s, e);
                placed = true;
            }
            r.push_back(p);
        }
    }
    if (!placed && e != 0) r.emplace_back(s, e);
    return r;
}

std::string mono_to_string(const Monomial& m) {
    std::string s;
    for (const auto& [k, e] : m) {
        if (!s.empty()) s += "*";
        s += k;
        if (e != 1) s += "^" + std::to_string(e);
    }
    return s;
}

Poly Poly::constant(const Q& c) {
    Poly p;
    if (sgn(c) != 0) p.t_.emplace_back(Monomial{}, c);
    return p;
}

Poly Poly::symbol(const std::string& s) {
    Poly p;
    p.t_.emplace_back(Monomial{{s, 1}}, Q(1));
    return p;
}

Poly Poly::from_entries(std::vector<Entry> e) {
    Poly p;
    p.t_ = std::move(e);
    p.normalize();
    return p;
}

void Poly::normalize() {
    std::sort(t_.begin(), t_.end(), [](const Entry& a, const Entry& b) { return mono_cmp(a.first, b.first) < 0; });
    std::vector<Entry> out;
    for (auto& e : t_) {
        if (!out.empty() && mono_cmp(out.back().first, e.first) == 0) {
            out.back().second += e.second;
        } else {
            out.push_back(std::move(e));
        }
    }
    t_.clear();
    for (auto& e : out)
        if (sgn(e.second) != 0) t_.push_back(std::move(e));
}

bool Poly::is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].first.empty()); }

Q Poly::constant_part() const {
    for (const auto& [m, c] : t_)
        if (m.empty()) return c;
    return Q(0);
}

bool Poly::contains(const std::string& s) const {
    for (const auto& [m, c] : t_)
        if (mono_exp(m, s) != 0) return true;
    return false;
}

void Poly::collect_symbols(std::set<std::string>& out) const {
    for (const auto& [m, c] : t_)
        for (const auto& [s, e] : m) out.insert(s);
}

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& e : r.t_) e.second = -e.second;
    return r;
}

Poly& Poly::operator+=(const Poly& o) {
    t_.insert(t_.end(), o.t_.begin(), o.t_.end());
    normalize();
    return *this;
}

Poly& Poly::operator-=(const Poly& o) { return *this += -o; }

Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ma, ca] : a.t_)
        for (const auto& [mb, cb] : b.t_) r.t_.emplace_back(mono_mul(ma, mb), ca * cb);
    r.normalize();
    return r;
}

Poly Poly::scaled(const Q& c) const {
    if (sgn(c) == 0) return {};
    Poly r = *this;
    for (auto& e : r.t_) e.second *= c;
    return r;
}

Poly Poly::pow(int n) const {
    if (n < 0) {
        if (t_.size() != 1) throw std::domain_error("negative power of a non-monomial polynomial");
        Poly r;
        r.t_.emplace_back(mono_pow(t_[0].first, n), Q(1) / t_[0].second);
        for (int k = 1; k < -n; ++k) r.t_[0].second /= t_[0].second;
        return r;
    }
    Poly r = constant(1);
    for (int k = 0; k < n; ++k) r = r * *this;
    return r;
}

std::pair<Poly, Poly> Poly::split(const std::string& s) const {
    Poly with, without;
    for (const auto& e : t_) {
        if (mono_exp(e.first, s) != 0) with.t_.push_back(e);
        else without.t_.push_back(e);
    }
    return {with, without};
}

bool operator==(const Poly& a, const Poly& b) {
    if (a.t_.size() != b.t_.size()) return false;
    for (size_t i = 0; i < a.t_.size(); ++i)
        if (a.t_[i].second != b.t_[i].second || mono_cmp(a.t_[i].first, b.t_[i].first) != 0) return false;
    return true;
}

int poly_cmp(const Poly& a, const Poly& b) {
    const auto& x = a.entries();
    const auto& y = b.entries();
    size_t n = std::min(x.size(), y.size());
    for (size_t i = 0; i < n; ++i) {
        int c = mono_cmp(x[i].first, y[i].first);
        if (c != 0) return c;
        c = ::cmp(x[i].second, y[i].second);
        if (c != 0) return c < 0 ? -1 : 1;
    }
    if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
    return 0;
}

// Compact form used inside exp()/sin()/cos(): "-tau+eps*tau", "t/2+theta".
std::string to_string(const Poly& p) {
    if (p.is_zero()) return "0";
    std::string s;
    for (const auto& [m, c] : p.entries()) {
        Q a = abs(c);
        bool neg = sgn(c) < 0;
        if (neg) s += "-";
        else if (!s.empty()) s += "+";
        std::string num = a.get_num().get_str();
        std::string den = a.get_den().get_str();
        std::string ms = mono_to_string(m);
        if (ms.empty()) {
            s += num;
            if (den != "1") s += "/" + den;
        } else {
            if (num != "1") s += num + "*";
            s += ms;
            if (den != "1") s += "/" + den;
        }
    }
    return s;
}

} // namespace hsym::exprcore
