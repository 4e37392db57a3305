#include "expr_doctest.hpp"

#include "hsym/pertseries.hpp"

#include <random>

using namespace hsym::pertseries;
using hsym::exprcore::make_q;
using hsym::exprcore::parse;

static Expr P(const char* s) { return parse(s); }

static ODEProblem problem(const char* var, const char* dep, const char* lhs, int order) {
    ODEProblem p;
    p.var = var;
    p.dep = dep;
    p.equation = P(lhs);
    p.order = order;
    return p;
}

TEST_CASE("characteristic roots and kernel basis") {
    LinearOperator L{{0, 1, 1}, "tau"};  // y'' + y'
    auto roots = characteristic_roots(L);
    REQUIRE(roots.size() == 2);
    CHECK(kernel_basis(L) == std::vector<Expr>{P("1"), P("exp(-tau)")});

    LinearOperator osc{{1, 0, 1}, "t"};
    CHECK(kernel_basis(osc) == std::vector<Expr>{P("cos(t)"), P("sin(t)")});

    LinearOperator filament{{1, 0, 2, 0, 1}, "y"};  // (D^2+1)^2
    auto fb = kernel_basis(filament);
    CHECK(fb == std::vector<Expr>{P("cos(y)"), P("sin(y)"), P("y*cos(y)"), P("y*sin(y)")});

    LinearOperator irrational{{1, 1, 1}, "x"};  // roots (-1 +- i sqrt 3)/2
    CHECK_THROWS(characteristic_roots(irrational));
}

TEST_CASE("constant count equals differential order") {
    for (auto c : {std::vector<Q>{0, 1, 1}, std::vector<Q>{1, 0, 2, 0, 1}, std::vector<Q>{0, 1, 0, 1}}) {
        LinearOperator L{c, "x"};
        std::vector<std::string> names;
        for (int i = 0; i < L.differential_order(); ++i) names.push_back("C" + std::to_string(i));
        auto cf = complementary_function(L, names);
        CHECK(cf.constants.size() == static_cast<size_t>(L.differential_order()));
        CHECK(L.apply(cf.solution).is_zero());
    }
    auto s = build_bare_series(problem("tau", "y", "y'' + y' + eps*y", 1));
    CHECK(s.constants_at(0).size() == 2);
}

TEST_CASE("particular solutions handle resonance") {
    LinearOperator osc{{1, 0, 1}, "x"};
    CHECK(particular_solution(osc, P("sin(x)")) == P("-x*cos(x)/2"));
    LinearOperator L{{0, 1, 1}, "tau"};
    const Expr y = particular_solution(L, P("-A - B*exp(-tau)"));
    CHECK(y == P("-A*tau + B*tau*exp(-tau)"));
    CHECK_THROWS(particular_solution(osc, P("sin(w*x)")));
}

TEST_CASE("resonance property: L[y] = f for random operators and forcings") {
    // operators built from chosen roots so resonant forcings are common
    const std::vector<std::pair<Q, Q>> pool{{0, 0}, {-1, 0}, {make_q(1, 2), 0}, {0, 1}, {-1, 2}, {make_q(-1, 2), 1}};
    std::mt19937_64 rng(5);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    int checked = 0;
    for (int it = 0; it < 300; ++it) {
        // product of (z - r) factors, conjugate pairs for complex r
        std::vector<Q> c{1};
        auto mul = [&](const std::vector<Q>& f) {
            std::vector<Q> out(c.size() + f.size() - 1, Q(0));
            for (size_t i = 0; i < c.size(); ++i)
                for (size_t j = 0; j < f.size(); ++j) out[i + j] += c[i] * f[j];
            c = out;
        };
        std::vector<std::pair<Q, Q>> used;
        const int nf = pick(1, 3);
        for (int k = 0; k < nf; ++k) {
            auto [a, b] = pool[pick(0, static_cast<int>(pool.size()) - 1)];
            used.push_back({a, b});
            if (b == 0)
                mul({-a, 1});
            else
                mul({a * a + b * b, -2 * a, 1});
        }
        LinearOperator L{c, "x"};
        Expr f;
        for (int k = 0; k < pick(1, 3); ++k) {
            auto [a, b] = pick(0, 1) ? used[pick(0, static_cast<int>(used.size()) - 1)]
                                     : pool[pick(0, static_cast<int>(pool.size()) - 1)];
            Expr t = Expr(make_q(pick(1, 5), pick(1, 3))) * Expr::sym("x").pow(pick(0, 2)) *
                     hsym::exprcore::exp(Expr(a) * Expr::sym("x"));
            if (b != 0) t = t * (pick(0, 1) ? hsym::exprcore::cos(Expr(b) * Expr::sym("x"))
                                            : hsym::exprcore::sin(Expr(b) * Expr::sym("x") + Expr::sym("p")));
            f += t;
        }
        const Expr y = particular_solution(L, f);
        CHECK(L.apply(y) == f);
        ++checked;
    }
    CHECK(checked == 300);
}

TEST_CASE("overdamped bare series") {
    auto p = problem("tau", "y", "y'' + y' + eps*y", 2);
    p.higher[1] = p.higher[2] = {ConstantsMode::Particular, {}, std::nullopt};
    auto s = build_bare_series(p);
    REQUIRE(s.orders.size() == 3);
    CHECK(s.orders[0] == P("A + B*exp(-tau)"));
    CHECK(s.orders[1] == P("-A*tau + B*tau*exp(-tau)"));
    CHECK(s.orders[2] == P("A*(tau^2/2 - tau) + B*(tau + tau^2/2)*exp(-tau)"));
    for (const auto& r : residuals(p, s)) CHECK(r.is_zero());
}

TEST_CASE("Mathieu order one with fresh constants") {
    auto p = problem("t", "y", "y'' + (1/4 + eps*a1 + 2*eps*cos(t))*y", 1);
    p.zeroth = {ConstantsMode::Fresh, {"R", "theta"}, P("R*cos(t/2 + theta)")};
    p.higher[1] = {ConstantsMode::Fresh, {"A", "B"}, P("A*cos(t/2 + theta) + B*sin(t/2 + theta)")};
    auto s = build_bare_series(p);
    CHECK(s.orders[1] == P("A*cos(t/2+theta) + B*sin(t/2+theta) + R*(cos(3*t/2+theta)/2 + sin(2*theta)*t*cos(t/2+theta) - "
                           "(cos(2*theta)+a1)*t*sin(t/2+theta))"));
    for (const auto& r : residuals(p, s)) CHECK(r.is_zero());
}

TEST_CASE("KdV forcing at order one") {
    auto p = problem("theta", "W", "W''' + W' + 9*eps*delta^-2*k^-2*W*W'", 1);
    p.zeroth = {ConstantsMode::Fresh, {"R", "phi"}, P("R*sin(theta + phi)")};
    auto split = split_equation(p);
    const Expr f = forcing_at(p, split, {P("R*sin(theta + phi)")}, 1);
    CHECK(f == P("-9*R^2*delta^-2*k^-2*sin(2*theta + 2*phi)/2"));
    auto s = build_bare_series(p);
    for (const auto& r : residuals(p, s)) CHECK(r.is_zero());
}

TEST_CASE("filament forcing drop rule") {
    auto p = problem("y", "W", "W'''' + 2*W'' + W - eps*(y*W' + y^2*W''/2)", 1);
    p.zeroth = {ConstantsMode::Fresh, {"A1", "A2", "alpha1", "alpha2"}, std::nullopt};
    p.higher[1] = {ConstantsMode::Fresh, {"c1", "c2", "c3", "c4"}, std::nullopt};
    p.drop_in_forcing = {"alpha1", "alpha2"};
    auto s = build_bare_series(p);
    CHECK_FALSE(s.orders[1].depends_on("alpha1"));
    for (const auto& r : residuals(p, s)) CHECK(r.is_zero());
}

TEST_CASE("zero initial data policy") {
    LinearOperator L{{1, 0, 1}, "x"};
    auto sol = solve_order(L, P("cos(2*x)"), {ConstantsMode::ZeroICs, {}, std::nullopt});
    CHECK(L.apply(sol.y) == P("cos(2*x)"));
    CHECK(hsym::exprcore::substitute(sol.y, "x", Expr(0)).is_zero());
    CHECK(hsym::exprcore::substitute(hsym::exprcore::diff(sol.y, "x"), "x", Expr(0)).is_zero());
}
