#include "expr_doctest.hpp"

#include "hsym/bcpert.hpp"

#include <boost/math/special_functions/expint.hpp>

#include <cmath>
#include <stdexcept>

using namespace hsym;
using exprcore::Expr;

TEST_CASE("exponential integrals against boost") {
    for (int n : {1, 2, 3}) {
        for (double x : {1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0, 7.5, 30.0, 60.0}) {
            // boost normalizes E_n(x) = x^(n-1) e_n(x)
            const double ref = std::pow(x, 1 - n) * boost::math::expint(n, x);
            CHECK(bcpert::exp_integral(n, x) == doctest::Approx(ref).epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS(bcpert::exp_integral(1, 0.0), std::domain_error);
    CHECK_THROWS_AS(bcpert::exp_integral(1, -1.0), std::domain_error);
    bcpert::SwitchbackProblem p;
    p.n = 3;
    CHECK_THROWS_AS(bcpert::switchback_series(p), std::invalid_argument);
}

TEST_CASE("switchback series solves its hierarchy") {
    for (int n : {2, 3}) {
        for (int delta : {0, 1}) {
            bcpert::SwitchbackProblem p;
            p.n = n;
            p.delta = delta;
            p.order = n == 3 ? 1 : 2;
            auto s = bcpert::switchback_series(p);
            CHECK(s.orders[0] == Expr(1));
            for (int j = 0; j < static_cast<int>(s.orders.size()); ++j) CHECK(bcpert::switchback_residual(s, j).is_zero());
        }
    }
}

TEST_CASE("fitted series meets the boundary data") {
    for (double a : {0.3, 1.0}) {
        bcpert::SwitchbackProblem p;
        p.eps = 1e-3;
        p.a = a;
        auto s = bcpert::switchback_series(p);
        for (int m : {1, 2}) {
            CHECK(s(p.eps, m) == doctest::Approx(1.0 - a).epsilon(1e-10));
            CHECK(s(60.0, m) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("most divergent partial sums converge to the log") {
    for (double z : {-0.9, -0.4, 0.2, 0.8}) CHECK(bcpert::most_divergent_partial_sum(z, 400) == doctest::Approx(std::log1p(z)));
    auto md = bcpert::most_divergent_sum(1e-4, 1.0);
    CHECK(md.radius(2.0) == doctest::Approx(boost::math::expint(1, 1e-4) / boost::math::expint(1, 2.0)));
}

TEST_CASE("hidden-scale route equals the most divergent sum") {
    for (double a : {0.25, 0.5, 1.0}) {
        auto md = bcpert::most_divergent_sum(1e-4, a);
        auto th = bcpert::terrible_hidden_scale(1e-4, a);
        CHECK(th.form == md.form);
    }
}

TEST_CASE("exact asymptotic solution at a = 1") {
    const double eps = 1e-4, e = std::exp(1.0);
    auto md = bcpert::most_divergent_sum(eps, 1.0);
    auto exact = bcpert::terrible_exact_asymptotic();
    for (double x : {1e-4, 1e-3, 0.1, 1.0, 5.0}) {
        const double ref = std::log(e + (1 - e) * boost::math::expint(1, x) / boost::math::expint(1, eps));
        std::map<std::string, double> v;
        bcpert::bind_exp_integrals(x, eps, v);
        CHECK(md(x) == doctest::Approx(ref).epsilon(1e-12));
        CHECK(exact.evaluate(v) == doctest::Approx(ref).epsilon(1e-12));
    }
}
