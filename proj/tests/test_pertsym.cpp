#include "expr_doctest.hpp"

#include "hsym/pertsym.hpp"
#include "hsym/numlab.hpp"

#include <boost/math/special_functions/lambert_w.hpp>

#include <cmath>
#include <random>

using namespace hsym;
using exprcore::Expr;
using exprcore::parse;

static Expr P(const char* s) { return parse(s); }

static pertsym::GeneratorAnsatz oscillator_ansatz() {
    pertsym::GeneratorAnsatz a;
    a.dep = "y";
    a.directions = {{"t", false, pertsym::default_shapes("t", "y", "s")}, {"y", true, pertsym::default_shapes("t", "y", "s")}};
    return a;
}

// exact solution of y'' + eps y' + y = 0 with the closed form's data at t = 0
static double underdamped_exact(double t, double eps, double y0, double v0) {
    const double w = std::sqrt(1 - eps * eps / 4);
    const double c = y0, s = (v0 + eps * y0 / 2) / w;
    return std::exp(-eps * t / 2) * (c * std::cos(w * t) + s * std::sin(w * t));
}

TEST_CASE("switch series and default shapes") {
    CHECK(pertsym::switch_series({P("a"), P("b")}, "eps", "s") == P("a + eps*s*b"));
    CHECK(pertsym::default_shapes("t", "y", "s").size() == 7);
}

TEST_CASE("underdamped generator") {
    auto orders = pertsym::underdamped_series();
    REQUIRE(orders.size() == 3);
    CHECK(orders[1] == P("-A*t*sin(t+theta)/2"));
    auto g = pertsym::solve_determining(pertsym::switch_series(orders, "eps", "s"), oscillator_ansatz(), 2);
    CHECK(g.component("y", 1) == P("-t*y/2"));
    CHECK(g.component("t", 2) == P("s*t/4"));
    CHECK(g.component("t", 0).is_zero());
    CHECK(g.component("t", 1).is_zero());
    CHECK(g.component("y", 0).is_zero());
    CHECK(g.component("y", 2).is_zero());
    CHECK(g.free_weights.empty());
    for (const auto& r : g.residuals) CHECK(r.is_zero());
    CHECK(g.total("y") == P("-eps*t*y/2"));
}

TEST_CASE("too small an ansatz is reported") {
    auto a = oscillator_ansatz();
    for (auto& d : a.directions) d.shapes = {P("1")};
    auto Y = pertsym::switch_series(pertsym::underdamped_series(), "eps", "s");
    CHECK_THROWS_WITH_AS(pertsym::solve_determining(Y, a, 2), doctest::Contains("no perturbation symmetry"), std::runtime_error);
}

TEST_CASE("underdamped closed form") {
    auto r = pertsym::underdamped_uniform(0.1, 1.0, 0.5);
    REQUIRE(r.solution.symbolic.has_value());
    CHECK(*r.solution.symbolic == P("A*exp(-eps*t/2)*sin(theta + kappa*t)"));
    CHECK(r.solution(3.0, {}) == doctest::Approx(-0.298899).epsilon(1e-5));
    CHECK(r.solution(0.0, {}) == doctest::Approx(std::sin(0.5)));

    // error against the exact solution shrinks like eps^3
    std::vector<std::pair<double, double>> errs;
    for (double eps : {0.05, 0.1, 0.2}) {
        auto u = pertsym::underdamped_uniform(eps, 1.0, 0.5);
        const double y0 = u.solution(0.0, {}), h = 1e-5;
        const double v0 = (u.solution(h, {}) - u.solution(-h, {})) / (2 * h);
        double worst = 0;
        for (double t : numlab::linspace(0, 20, 401)) worst = std::max(worst, std::abs(u.solution(t, {}) - underdamped_exact(t, eps, y0, v0)));
        errs.emplace_back(eps, worst);
    }
    const double p = numlab::convergence_order(errs);
    CHECK(p >= 2.6);
    CHECK(p <= 3.4);
}

TEST_CASE("Lambert W against boost and its defining identity") {
    CHECK(pertsym::lambert_w(1.0) == doctest::Approx(0.5671432904097838).epsilon(1e-15));
    CHECK(pertsym::lambert_w(-std::exp(-1.0)) == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK(pertsym::lambert_w(0.0) == 0.0);
    CHECK(pertsym::lambert_w(1e300) == doctest::Approx(684.2472086).epsilon(1e-9));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> lz(-12, 12);
    for (int i = 0; i < 500; ++i) {
        const double z = std::pow(10.0, lz(rng));
        CHECK(pertsym::lambert_w(z) == doctest::Approx(boost::math::lambert_w0(z)).epsilon(1e-14));
    }
    const double zmin = -std::exp(-1.0) + 1e-6;
    int good = 0;
    for (double s : numlab::logspace(1e-6, 1e6 - zmin + 1e-6, 1000)) {
        const double z = zmin - 1e-6 + s;
        const double w = pertsym::lambert_w(z);
        if (std::abs(w * std::exp(w) - z) <= 1e-13 * std::max(1.0, std::abs(z))) ++good;
    }
    CHECK(good == 1000);
    for (double L : {2.0, 10.0, 100.0, 700.0}) CHECK(pertsym::lambert_w_log(L) == doctest::Approx(pertsym::lambert_w(std::exp(L))).epsilon(1e-14));
    const double big = pertsym::lambert_w_log(1e5);
    CHECK(big + std::log(big) == doctest::Approx(1e5).epsilon(1e-15));
}

TEST_CASE("Burgers closed form, root finder and bare series") {
    const auto prof = pertsym::log_profile();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ut(0.05, 20.0), ux(0.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        const double t = ut(rng), x = ux(rng);
        CHECK(std::abs(pertsym::burgers_ft_solve(prof, t, x, 0.1) - pertsym::burgers_closed_form(t, x, 0.1)) <= 1e-10);
    }
    for (double x : {0.0, 1.0, 4.0}) {
        CHECK(pertsym::burgers_ft_solve(prof, 0.0, x, 0.1) == std::log1p(x));
        CHECK(pertsym::burgers_bare(2.0, x, 0.1) == doctest::Approx(std::log1p(x) - 0.2 * std::log1p(x) / ((1 + x) * (1 + x))));
    }
    // implicit relation P(x) - P(H(u)) = eps*t*u
    const double t = 7.0, x = 2.0, eps = 0.1, u = pertsym::burgers_closed_form(t, x, eps);
    const double Hu = std::exp(u) - 1;
    CHECK((x * x / 2 + x) - (Hu * Hu / 2 + Hu) == doctest::Approx(eps * t * u).epsilon(1e-12));
}

TEST_CASE("Burgers generator") {
    pertsym::GeneratorAnsatz a;
    a.dep = "u";
    a.directions = {{"x", false, {P("1"), P("t"), P("t*u"), P("t*U_x"), P("t*u*U_x")}}};
    a.rules = {{"U", P("U_x")}, {"U_x", P("U_xx")}};
    a.match = {"t", "s", "U", "U_x", "U_xx"};
    auto Y = pertsym::switch_series({P("U"), P("-t*U*U_x^2")}, "eps", "s");
    auto g = pertsym::solve_determining(Y, a, 1);
    CHECK(g.component("x", 0).is_zero());
    CHECK(g.component("x", 1) == P("t*u*U_x"));
}
