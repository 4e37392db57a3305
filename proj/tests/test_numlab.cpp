#include "doctest.h"

#include "hsym/numlab.hpp"

#include <cmath>
#include <stdexcept>

using namespace hsym::numlab;

static Rhs decay(double lambda) {
    return [lambda](double, const State& y, State& d) { d[0] = lambda * y[0]; };
}

TEST_CASE("RK4 has observed order four") {
    auto err = [](double h) {
        IVPOptions o;
        o.method = Method::RK4Fixed;
        o.step = h;
        auto s = solve_ivp(decay(-1.3), {1.0}, 0.0, 2.0, o);
        return std::abs(s.final_state()[0] - std::exp(-2.6));
    };
    for (double h : {0.1, 0.05, 0.025}) {
        const double p = std::log2(err(h) / err(h / 2));
        CHECK(p == doctest::Approx(4.0).epsilon(0.05));
    }
}

TEST_CASE("adaptive RK45 meets its tolerance") {
    auto s = solve_ivp(
        [](double, const State& y, State& d) {
            d[0] = y[1];
            d[1] = -y[0];
        },
        {0.0, 1.0}, 0.0, 20.0);
    CHECK(std::abs(s.final_state()[0] - std::sin(20.0)) < 1e-8);
    CHECK(std::abs(s.at(7.3, 0) - std::sin(7.3)) < 1e-7);
}

TEST_CASE("dense output reproduces the nodes and runs backwards") {
    auto s = solve_ivp(decay(0.5), {2.0}, 3.0, -1.0);
    REQUIRE(s.t.size() > 2);
    CHECK(s.t.front() == 3.0);
    CHECK(s.t.back() == -1.0);
    for (size_t i = 0; i < s.t.size(); ++i) CHECK(s.at(s.t[i], 0) == s.y[i][0]);
    for (size_t i = 1; i < s.t.size(); ++i) CHECK(s.t[i] < s.t[i - 1]);
    CHECK(s.final_state()[0] == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-9));
}

TEST_CASE("non-finite right-hand side is reported") {
    Rhs blow = [](double, const State& y, State& d) { d[0] = y[0] * y[0]; };
    CHECK_THROWS_AS(solve_ivp(blow, {1.0}, 0.0, 2.0), std::runtime_error);
}

TEST_CASE("shooting satisfies both boundary conditions") {
    Rhs osc = [](double, const State& y, State& d) {
        d[0] = y[1];
        d[1] = -y[0];
    };
    auto b = solve_bvp_shooting(osc, 0.0, 0.0, 1.0, 1.0);
    CHECK(std::abs(b.profile.y.front()[0]) < 1e-9);
    CHECK(std::abs(b.profile.y.back()[0] - 1.0) < 1e-9);
    CHECK(b.slope == doctest::Approx(1.0 / std::sin(1.0)).epsilon(1e-8));

    // nonlinear: y'' = 1.5 y^2, y(0) = 4, y(1) = 1 has the solution 4/(1+x)^2
    Rhs nl = [](double, const State& y, State& d) {
        d[0] = y[1];
        d[1] = 1.5 * y[0] * y[0];
    };
    ShootingOptions so;
    so.slope0 = -7.0;
    so.slope1 = -9.0;
    auto c = solve_bvp_shooting(nl, 0.0, 4.0, 1.0, 1.0, so);
    CHECK(c.miss < 1e-9);
    CHECK(c.slope == doctest::Approx(-8.0).epsilon(1e-6));
}

TEST_CASE("Burgers oracle trivial cases") {
    BurgersOptions o;
    o.cells = 50;
    auto frozen = solve_burgers_mol([](double x) { return std::log1p(x); }, 0.0, {1.0, 5.0}, o);
    for (size_t i = 0; i < frozen.x.size(); ++i) CHECK(frozen.u[1][i] == doctest::Approx(std::log1p(frozen.x[i])));
    auto flat = solve_burgers_mol([](double) { return 0.7; }, 0.1, {3.0}, o);
    for (double u : flat.u[0]) CHECK(u == doctest::Approx(0.7));
    CHECK(flat.at(0, 2.5) == doctest::Approx(0.7));
}

TEST_CASE("convergence order and error reports") {
    CHECK(convergence_order({{0.05, 0.0025}, {0.1, 0.01}, {0.2, 0.04}}) == doctest::Approx(2.0));
    CHECK_THROWS(convergence_order({{0.1, 0.01}, {0.2, 0.04}}));
    CHECK_THROWS(convergence_order({{0.05, 0.0}, {0.1, 0.01}, {0.2, 0.04}}));

    auto r = compare({0, 1, 2}, {1.0, 2.0, 3.0}, {1.1, 1.7, 3.0});
    double worst = 0;
    for (const auto& row : r.table) worst = std::max(worst, row.error);
    CHECK(r.sup_error == worst);
    CHECK(r.sup_error == doctest::Approx(0.3));
}

TEST_CASE("finite differences and grids") {
    auto f = [](double x) { return std::sin(x); };
    CHECK(fd_derivative(f, 0.4, 1, 1e-4) == doctest::Approx(std::cos(0.4)).epsilon(1e-7));
    CHECK(fd_derivative(f, 0.4, 2, 1e-3) == doctest::Approx(-std::sin(0.4)).epsilon(1e-5));
    CHECK(fd_derivative(f, 0.4, 3, 1e-2) == doctest::Approx(-std::cos(0.4)).epsilon(1e-3));
    CHECK(fd_derivative(f, 0.4, 4, 1e-2) == doctest::Approx(std::sin(0.4)).epsilon(1e-3));
    auto l = linspace(0, 15, 301);
    CHECK(l.size() == 301);
    CHECK(l.back() == 15.0);
    CHECK(l[20] == doctest::Approx(1.0));
    auto g = logspace(1e-4, 10, 6);
    CHECK(g.front() == doctest::Approx(1e-4));
    CHECK(g[1] / g[0] == doctest::Approx(10.0));
}
