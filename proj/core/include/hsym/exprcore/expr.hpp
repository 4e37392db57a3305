#pragma once

#include "hsym/exprcore/number.hpp"
#include "hsym/exprcore/poly.hpp"

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsym::exprcore {

// Raised when an operation would leave the exp-poly-trig class.
class OutOfClass : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// c * monomial * exp(rate) * exp(i*phase). The reserved symbol "pi" in a phase is
// folded into the coefficient when it appears as a multiple of pi/2.
struct Term {
    QI c;
    Monomial m;
    Poly rate;
    Poly phase;

    bool invertible() const { return !c.is_zero(); }
};

int term_key_cmp(const Term& a, const Term& b);

class Expr {
public:
    Expr() = default;
    Expr(long n);
    Expr(const Q& q);
    Expr(const QI& c);
    explicit Expr(Term t);

    static Expr sym(const std::string& name);
    static Expr imag_unit();
    static Expr from_terms(std::vector<Term> terms);
    static Expr from_poly(const Poly& p);

    const std::vector<Term>& terms() const { return terms_; }
    size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    bool is_number() const;
    std::optional<QI> as_number() const;
    bool is_single_term() const { return terms_.size() == 1; }
    // Real polynomial view (no exponentials, real coefficients), if any.
    std::optional<Poly> as_poly() const;
    std::set<std::string> symbols() const;
    bool depends_on(const std::string& s) const;

    Expr operator-() const;
    Expr& operator+=(const Expr& o);
    Expr& operator-=(const Expr& o);
    Expr& operator*=(const Expr& o);
    friend Expr operator+(Expr a, const Expr& b) { return a += b; }
    friend Expr operator-(Expr a, const Expr& b) { return a -= b; }
    friend Expr operator*(const Expr& a, const Expr& b);
    friend bool operator==(const Expr& a, const Expr& b);
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

    Expr pow(int n) const;
    Expr inverse() const; // only for single terms
    Expr conj() const;
    bool is_real() const { return *this == conj(); }
    Expr real_part() const;
    Expr imag_part() const;

private:
    void normalize();
    std::vector<Term> terms_;
};

int expr_cmp(const Expr& a, const Expr& b);

Expr exp(const Expr& arg);
Expr sin(const Expr& arg);
Expr cos(const Expr& arg);
Expr operator/(const Expr& a, const Expr& b);

// Symbol derivative rules for diff. Symbols listed in `tags` are treated as
// functions of `var` whose derivatives are the primed symbols ("A" -> "A'").
struct DiffContext {
    std::string var;
    std::map<std::string, Expr> rules;
    std::set<std::string> tags;
};

Expr diff(const Expr& e, const std::string& var);
Expr diff(const Expr& e, const DiffContext& ctx);
Expr diff_n(const Expr& e, const DiffContext& ctx, int n);

// Simultaneous substitution of symbols by in-class expressions. Symbols that occur
// in exponents require real polynomial replacements.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& repl);
Expr substitute(const Expr& e, const std::string& sym, const Expr& repl);

// Numeric evaluation. Unbound "pi" evaluates to M_PI; any other unbound symbol throws.
std::complex<double> evaluate(const Expr& e, const std::map<std::string, double>& values);
double evaluate_real(const Expr& e, const std::map<std::string, double>& values);

// Compiled evaluator for repeated numeric evaluation.
class Evaluator {
public:
    Evaluator() = default;
    Evaluator(const Expr& e, const std::vector<std::string>& slots);
    std::complex<double> operator()(const double* values) const;
    double real(const double* values) const { return (*this)(values).real(); }

private:
    struct Factor {
        int slot;
        int power;
    };
    struct PolyTerm {
        double c;
        std::vector<Factor> f;
    };
    struct CTerm {
        std::complex<double> c;
        std::vector<Factor> m;
        std::vector<PolyTerm> rate;
        std::vector<PolyTerm> phase;
    };
    std::vector<CTerm> terms_;
};

using DivergencePredicate = std::function<std::optional<bool>(const Term&)>;

struct DivergenceSplit {
    Expr divergent;
    Expr convergent;
};

// Default rule: a term is divergent iff its polynomial power of v is >= 1.
DivergenceSplit classify_divergent(const Expr& e, const std::string& v);
DivergenceSplit classify_divergent(const Expr& e, const std::string& v, const DivergencePredicate& pred);

} // namespace hsym::exprcore
