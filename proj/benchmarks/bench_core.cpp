#include "hsym/bcpert.hpp"
#include "hsym/hiddenscale.hpp"
#include "hsym/numlab.hpp"
#include "hsym/pertseries.hpp"
#include "hsym/pertsym.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace hsym;
using exprcore::Expr;
using exprcore::parse;

static void BM_ExprProduct(benchmark::State& st) {
    const Expr a = parse("R*cos(t/2+theta) + eps*(A*cos(t/2+theta) + B*sin(t/2+theta) + R*t*sin(t/2-theta))");
    const Expr b = parse("2*cos(t) + a1 + eps*t^2*exp(-t)");
    for (auto _ : st) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_ExprProduct);

static void BM_ExpandExponent(benchmark::State& st) {
    const Expr e = parse("A~*exp(-eps*tau) + B~*exp(-tau+eps*tau)");
    for (auto _ : st) benchmark::DoNotOptimize(exprcore::expand_in(e, "eps", static_cast<int>(st.range(0))));
}
BENCHMARK(BM_ExpandExponent)->Arg(2)->Arg(4)->Arg(8);

static void BM_Parse(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(parse("W''' + W' + 9*eps*delta^-2*k^-2*W*W' + R*sin(theta+phi)^3"));
}
BENCHMARK(BM_Parse);

static pertseries::ODEProblem kdv(int order) {
    pertseries::ODEProblem p;
    p.var = "theta";
    p.dep = "W";
    p.equation = parse("W''' + W' + 9*eps*delta^-2*k^-2*W*W'");
    p.order = order;
    p.zeroth = {pertseries::ConstantsMode::Fresh, {"R", "phi"}, parse("R*sin(theta + phi)")};
    return p;
}

static void BM_KdvBareSeries(benchmark::State& st) {
    const auto p = kdv(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(pertseries::build_bare_series(p));
}
BENCHMARK(BM_KdvBareSeries)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_MathieuFT(benchmark::State& st) {
    pertseries::ODEProblem p;
    p.var = "t";
    p.equation = parse("y'' + (1/4 + eps*a1 + 2*eps*cos(t))*y");
    p.zeroth = {pertseries::ConstantsMode::Fresh, {"R", "theta"}, parse("R*cos(t/2 + theta)")};
    p.higher[1] = {pertseries::ConstantsMode::Fresh, {"A", "B"}, parse("A*cos(t/2 + theta) + B*sin(t/2 + theta)")};
    const auto painted = hiddenscale::paint(pertseries::build_bare_series(p), 1);
    for (auto _ : st) benchmark::DoNotOptimize(hiddenscale::derive_ft_system(painted, 1));
}
BENCHMARK(BM_MathieuFT)->Unit(benchmark::kMicrosecond);

static void BM_UnderdampedGenerator(benchmark::State& st) {
    pertsym::GeneratorAnsatz a;
    a.directions = {{"t", false, pertsym::default_shapes("t", "y", "s")}, {"y", true, pertsym::default_shapes("t", "y", "s")}};
    const Expr Y = pertsym::switch_series(pertsym::underdamped_series(), "eps", "s");
    for (auto _ : st) benchmark::DoNotOptimize(pertsym::solve_determining(Y, a, 2));
}
BENCHMARK(BM_UnderdampedGenerator)->Unit(benchmark::kMillisecond);

static void BM_Rk45Oscillator(benchmark::State& st) {
    numlab::Rhs f = [](double, const numlab::State& y, numlab::State& d) {
        d[0] = y[1];
        d[1] = -y[1] - 0.2 * y[0];
    };
    for (auto _ : st) benchmark::DoNotOptimize(numlab::solve_ivp(f, {3.0, 1.0}, 0.0, 15.0));
}
BENCHMARK(BM_Rk45Oscillator)->Unit(benchmark::kMicrosecond);

static void BM_BurgersMol(benchmark::State& st) {
    numlab::BurgersOptions o;
    o.cells = static_cast<int>(st.range(0));
    for (auto _ : st)
        benchmark::DoNotOptimize(numlab::solve_burgers_mol([](double x) { return std::log1p(x); }, 0.1, {1.0, 10.0, 20.0}, o));
}
BENCHMARK(BM_BurgersMol)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_LambertW(benchmark::State& st) {
    double z = 1e-3;
    for (auto _ : st) {
        benchmark::DoNotOptimize(pertsym::lambert_w(z));
        z = z < 1e6 ? z * 1.37 : 1e-3;
    }
}
BENCHMARK(BM_LambertW);

static void BM_BurgersClosedForm(benchmark::State& st) {
    double x = 0.0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(pertsym::burgers_closed_form(20.0, x, 0.1));
        x = x < 5.0 ? x + 0.01 : 0.0;
    }
}
BENCHMARK(BM_BurgersClosedForm);

static void BM_ExpIntegral(benchmark::State& st) {
    double x = 1e-4;
    for (auto _ : st) {
        benchmark::DoNotOptimize(bcpert::exp_integral(1, x));
        x = x < 40 ? x * 1.1 : 1e-4;
    }
}
BENCHMARK(BM_ExpIntegral);

BENCHMARK_MAIN();
