#include "kernel_props.hpp"

#include <cmath>
#include <map>

namespace hsym::testsupport {

using exprcore::make_q;
using exprcore::print;

Expr ExprGen::term(bool laurent) {
    const Expr x = Expr::sym("x"), a = Expr::sym("a"), b = Expr::sym("b");
    long num = pick(-9, 9);
    if (num == 0) num = 1;
    Expr t = Expr(make_q(num, pick(1, 6)));
    t = t * x.pow(pick(0, 3));
    const int ja = laurent ? pick(-2, 2) : pick(0, 2);
    if (ja != 0) t = t * a.pow(ja);
    switch (pick(0, 3)) {
    case 0:
        t = t * exprcore::exp(Expr(make_q(pick(-4, 4), pick(1, 3))) * x);
        break;
    case 1:
        t = t * exprcore::cos(Expr(make_q(pick(1, 5), pick(1, 2))) * x + (pick(0, 1) ? b : Expr(0)));
        break;
    case 2:
        t = t * exprcore::sin(Expr(make_q(pick(1, 5), pick(1, 2))) * x + (pick(0, 1) ? b : Expr(0)));
        break;
    default:
        break;
    }
    return t;
}

Expr ExprGen::expr(int max_terms, bool laurent) {
    Expr e;
    const int n = pick(1, max_terms);
    for (int i = 0; i < n; ++i) e += term(laurent);
    return e;
}

Expr ExprGen::eps_poly(int max_deg, int max_terms) {
    const Expr eps = Expr::sym("eps");
    Expr e;
    for (int j = 0; j <= max_deg; ++j)
        if (pick(0, 3) != 0) e += eps.pow(j) * expr(max_terms);
    return e;
}

PropertyTally algebraic_properties(std::uint64_t seed, int cases) {
    ExprGen g(seed);
    PropertyTally t;
    auto fail = [&](const std::string& what, const Expr& e) {
        if (t.failures.size() < 10) t.failures.push_back(what + ": " + print(e));
    };
    for (int i = 0; i < cases; ++i) {
        const Expr a = g.expr(3), b = g.expr(3), c = g.expr(3);
        switch (i % 4) {
        case 0:
            if (a * (b + c) == a * b + a * c) ++t.ring; else fail("distributivity", a);
            break;
        case 1:
            if ((a * b) * c == a * (b * c)) ++t.ring; else fail("associativity", a);
            break;
        case 2:
            if (a * b == b * a && a + b == b + a) ++t.ring; else fail("commutativity", a);
            break;
        default:
            if ((a - a).is_zero() && a * Expr(1) == a && (a + Expr()) == a) ++t.ring; else fail("identities", a);
            break;
        }

        const std::string v = (i % 3 == 0) ? "b" : "x";
        if (exprcore::diff(a * b, v) == exprcore::diff(a, v) * b + a * exprcore::diff(b, v))
            ++t.derivation;
        else
            fail("leibniz in " + v, a * b);

        const Expr e = g.eps_poly(3, 2);
        Expr back;
        const int top = e.is_zero() ? 0 : exprcore::max_power(e, "eps");
        for (int j = 0; j <= top; ++j) back += Expr::sym("eps").pow(j) * exprcore::collect_order(e, "eps", j, top);
        if (back == e && exprcore::truncate(e, "eps", top) == e) ++t.round_trip; else fail("round trip", e);
    }
    return t;
}

PropertyTally finite_difference_properties(std::uint64_t seed, int cases, double rel_tol) {
    ExprGen g(seed);
    PropertyTally t;
    for (int i = 0; i < cases; ++i) {
        const Expr e = g.expr(4);
        const Expr d = exprcore::diff(e, "x");
        std::map<std::string, double> v{{"a", g.uniform(0.5, 1.5)}, {"b", g.uniform(-1.0, 1.0)}};
        const double x0 = g.uniform(0.2, 2.0);
        auto f = [&](double x) {
            v["x"] = x;
            return exprcore::evaluate_real(e, v);
        };
        // Richardson on central differences: error O(h^4)
        const double h = 1e-3;
        const double c1 = (f(x0 + h) - f(x0 - h)) / (2 * h);
        const double c2 = (f(x0 + h / 2) - f(x0 - h / 2)) / h;
        const double fd = (4 * c2 - c1) / 3;
        v["x"] = x0;
        const double exact = exprcore::evaluate_real(d, v);
        const double rel = std::abs(exact - fd) / std::max(std::abs(exact), 1.0);
        t.worst_fd_rel = std::max(t.worst_fd_rel, rel);
        if (rel <= rel_tol)
            ++t.finite_difference;
        else if (t.failures.size() < 10)
            t.failures.push_back("fd mismatch " + std::to_string(rel) + " for " + print(e));
    }
    return t;
}

} // namespace hsym::testsupport
