#pragma once

#include "hsym/exprcore/number.hpp"

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace hsym::exprcore {

// Laurent monomial: sorted by symbol name, no zero exponents.
using Monomial = std::vector<std::pair<std::string, int>>;

int mono_cmp(const Monomial& a, const Monomial& b);
Monomial mono_mul(const Monomial& a, const Monomial& b);
Monomial mono_pow(const Monomial& a, int n);
Monomial mono_inv(const Monomial& a);
int mono_exp(const Monomial& m, const std::string& s);
Monomial mono_with(const Monomial& m, const std::string& s, int e);
int mono_degree(const Monomial& m);

// Polynomial with rational coefficients over Laurent monomials; used for the
// real part (rate) and imaginary part (phase) of exponents.
class Poly {
public:
    using Entry = std::pair<Monomial, Q>;

    Poly() = default;
    static Poly constant(const Q& c);
    static Poly symbol(const std::string& s);
    static Poly from_entries(std::vector<Entry> e);

    const std::vector<Entry>& entries() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const;
    Q constant_part() const;
    bool contains(const std::string& s) const;
    void collect_symbols(std::set<std::string>& out) const;

    Poly operator-() const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly scaled(const Q& c) const;
    Poly pow(int n) const;

    // Split into (terms containing s, terms free of s).
    std::pair<Poly, Poly> split(const std::string& s) const;

    friend bool operator==(const Poly& a, const Poly& b);
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

private:
    void normalize();
    std::vector<Entry> t_;
};

int poly_cmp(const Poly& a, const Poly& b);
std::string to_string(const Poly& p);
std::string mono_to_string(const Monomial& m);

} // namespace hsym::exprcore
