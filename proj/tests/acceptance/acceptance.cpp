// Acceptance run: one PASS/FAIL line per criterion. Numeric errors are recomputed here
// against oracles that share no code with the library (boost odeint, boost expint,
// closed-form linear solutions).
#include "hsym/bcpert.hpp"
#include "hsym/cli/pipelines.hpp"
#include "hsym/cli/spec.hpp"
#include "hsym/exprcore.hpp"
#include "hsym/numlab.hpp"
#include "hsym/pertsym.hpp"
#include "kernel_props.hpp"

#include "CLI11.hpp"

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

namespace odeint = boost::numeric::odeint;
using hsym::cli::ProblemSpec;
using hsym::cli::RunReport;
using hsym::exprcore::Expr;
using hsym::exprcore::parse;

namespace {

// pinned tolerances and runtime limits
constexpr double kOrderMin2 = 1.7, kOrderMax2 = 2.3, kBareRatio2 = 10.0;
constexpr double kDrift3 = 3.0;
constexpr double kTextbookRatio4 = 0.5;
constexpr double kOracleTol5 = 1e-2;
constexpr double kOrderMin7 = 2.6, kOrderMax7 = 3.4;
constexpr double kClosedForm8 = 1e-10, kSup8 = 5e-2, kBareRatio8 = 10.0;
constexpr int kAlgebraic9 = 10000, kFd9 = 1000;
constexpr double kFdRel9 = 1e-6;
constexpr double kLimit[10] = {0, 1, 10, 10, 10, 30, 5, 10, 60, 30};

std::string corpus_dir = HSYM_CORPUS_DIR;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void need(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

std::string num(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.4g", v);
    return b;
}

ProblemSpec load(const std::string& name) { return hsym::cli::parse_spec(corpus_dir + "/" + name + ".spec"); }

ProblemSpec with(ProblemSpec s, const std::string& key, const std::string& value) {
    s.entries[key].text = value;
    return s;
}

std::string line_after(const RunReport& r, const std::string& title, const std::string& prefix) {
    for (const auto& s : r.symbolic)
        if (s.title == title)
            for (const auto& l : s.lines)
                if (l.rfind(prefix, 0) == 0) return l.substr(prefix.size());
    throw std::runtime_error("no line '" + prefix + "' in [" + title + "]");
}

bool check_passed(const RunReport& r, const std::string& name_prefix) {
    for (const auto& c : r.checks)
        if (c.name.rfind(name_prefix, 0) == 0) return c.passed;
    return false;
}

std::vector<double> column(const RunReport& r, const std::string& table, const std::string& col) {
    for (const auto& t : r.tables) {
        if (t.name != table) continue;
        for (size_t j = 0; j < t.headers.size(); ++j) {
            if (t.headers[j] != col) continue;
            std::vector<double> out;
            for (const auto& row : t.rows) out.push_back(row[j]);
            return out;
        }
    }
    throw std::runtime_error("no column " + table + "." + col);
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

using Vec = std::vector<double>;

// classic RK4 from odeint, sampled at xs (xs[0] is the start)
Vec rk4_curve(const std::function<void(const Vec&, Vec&, double)>& f, Vec y, const Vec& xs, double h) {
    odeint::runge_kutta4<Vec> stepper;
    Vec out{y[0]};
    double x = xs.front();
    for (size_t i = 1; i < xs.size(); ++i) {
        const int n = std::max(1, static_cast<int>(std::lround((xs[i] - x) / h)));
        const double dh = (xs[i] - x) / n;
        for (int k = 0; k < n; ++k) {
            stepper.do_step(f, y, x, dh);
            x += dh;
        }
        x = xs[i];
        out.push_back(y[0]);
    }
    return out;
}

double fitted_order(const std::vector<std::pair<double, double>>& e) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [a, b] : e) {
        const double x = std::log(a), y = std::log(b);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double n = static_cast<double>(e.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// 1. derive yields the closed-form uniform solution
Outcome criterion1() {
    Outcome o;
    auto r = hsym::cli::run_derive(load("overdamped"));
    const Expr u = parse(line_after(r, "uniform solution", "y = "));
    const Expr want = parse("A~*exp(-eps*tau) + B~*exp(-(1-eps)*tau)");
    o.need(u == want, "uniform solution");
    o.detail << "y = " << hsym::exprcore::print(u);
    return o;
}

// 2. error scaling against RK4, and the bare series at the window end
Outcome criterion2() {
    Outcome o;
    const ProblemSpec base = load("overdamped");
    std::vector<std::pair<double, double>> errs;
    double bare_end = 0, uni_end = 0, rk_vs_exact = 0;
    for (double eps : {0.05, 0.1, 0.2}) {
        auto spec = with(base, "params.eps", num(eps));
        spec.entries.erase("sweep.eps");
        auto r = hsym::cli::run_validate(spec, {});
        const Vec xs = column(r, "overdamped_solution", "tau");
        const Vec uni = column(r, "overdamped_solution", "uniform"), bare = column(r, "overdamped_solution", "bare");
        const Vec ref = rk4_curve(
            [eps](const Vec& y, Vec& d, double) {
                d[0] = y[1];
                d[1] = -y[1] - eps * y[0];
            },
            {3.0, 1.0}, xs, 1e-3);
        // the RK4 oracle against the exact two-exponential solution
        const double l1 = (-1 + std::sqrt(1 - 4 * eps)) / 2, l2 = (-1 - std::sqrt(1 - 4 * eps)) / 2;
        const double c2 = (1 - 3 * l1) / (l2 - l1), c1 = 3 - c2;
        for (size_t i = 0; i < xs.size(); ++i)
            rk_vs_exact = std::max(rk_vs_exact, std::abs(ref[i] - (c1 * std::exp(l1 * xs[i]) + c2 * std::exp(l2 * xs[i]))));
        errs.emplace_back(eps, sup_diff(ref, uni));
        if (eps == 0.2) {
            bare_end = std::abs(bare.back() - ref.back());
            uni_end = std::abs(uni.back() - ref.back());
        }
    }
    const double p = fitted_order(errs);
    o.need(rk_vs_exact < 1e-9, "RK4 oracle vs exact solution");
    o.need(p >= kOrderMin2 && p <= kOrderMax2, "order");
    o.need(bare_end >= kBareRatio2 * uni_end, "bare ratio");
    o.detail << "p = " << num(p) << " in [" << kOrderMin2 << ", " << kOrderMax2 << "]; bare/uniform at tau=15: "
             << num(bare_end / uni_end) << " >= " << kBareRatio2 << "; RK4 vs exact " << num(rk_vs_exact);
    return o;
}

// 3. Mathieu FT system and the eps-halving error constant
Outcome criterion3() {
    Outcome o;
    const ProblemSpec base = load("mathieu");
    auto d = hsym::cli::run_derive(base);
    o.need(parse(line_after(d, "FT system", "R' = ")) == parse("-eps*R*sin(2*theta)"), "R'");
    o.need(parse(line_after(d, "FT system", "theta' = ")) == parse("-eps*(cos(2*theta)+a1)"), "theta'");
    const double eps = 0.15, a1 = 1.2;
    double C[2];
    double sup = 0;
    int i = 0;
    for (double e : {eps, eps / 2}) {
        auto r = hsym::cli::run_validate(with(base, "params.eps", num(e)), {});
        const Vec xs = column(r, "mathieu_solution", "t"), uni = column(r, "mathieu_solution", "uniform");
        const Vec ref = rk4_curve(
            [e, a1](const Vec& y, Vec& dy, double t) {
                dy[0] = y[1];
                dy[1] = -(0.25 + e * a1 + 2 * e * std::cos(t)) * y[0];
            },
            {1.0, 0.0}, xs, 1e-3);
        const double err = sup_diff(ref, uni);
        if (i == 0) sup = err;
        C[i++] = err / (e * e);
    }
    const double drift = std::max(C[0], C[1]) / std::min(C[0], C[1]);
    const double Cmax = std::max(C[0], C[1]);
    o.need(drift <= kDrift3, "drift");
    o.need(sup <= Cmax * eps * eps * (1 + 1e-12), "sup <= C eps^2");
    o.detail << "FT system matches; sup error " << num(sup) << " <= C*eps^2 = " << num(Cmax * eps * eps) << "; drift "
             << num(drift) << " <= " << kDrift3;
    return o;
}

// 4. KdV strained coordinate against the textbook value
Outcome criterion4() {
    Outcome o;
    const ProblemSpec spec = load("kdv");
    auto d = hsym::cli::run_derive(spec);
    const Expr q = parse(line_after(d, "strained coordinate", "q = "));
    o.need(q == parse("135/16*eps^2*A1^2*k^-4*delta^-4"), "q");
    hsym::cli::RunOptions opts;
    opts.compare_textbook = true;
    auto r = hsym::cli::run_validate(spec, opts);
    const Vec xs = column(r, "kdv_solution", "theta");
    const double eps = 0.14;
    const Vec ref = rk4_curve(
        [eps](const Vec& y, Vec& dy, double) {
            dy[0] = y[1];
            dy[1] = y[2];
            dy[2] = -y[1] - 9 * eps * y[0] * y[1];
        },
        {0.0, 0.5, 0.0}, xs, 1e-3);
    const double hs = sup_diff(ref, column(r, "kdv_solution", "hidden_scale"));
    const double tb = sup_diff(ref, column(r, "kdv_solution", "textbook"));
    o.need(hs <= kTextbookRatio4 * tb, "ratio");
    o.detail << "q = " << hsym::exprcore::print(q) << "; sup error " << num(hs) << " <= " << kTextbookRatio4 << " * " << num(tb);
    return o;
}

// shooting for u'' + u'/x + u u' + u'^2 = 0 in t = ln x with odeint
Vec terrible_oracle(double eps, const Vec& xs) {
    auto f = [](const Vec& y, Vec& d, double t) {
        d[0] = y[1];
        d[1] = -std::exp(t) * y[0] * y[1] - y[1] * y[1];
    };
    const double t0 = std::log(eps), t1 = std::log(50.0);
    auto end_value = [&](double s) {
        Vec y{0.0, s};
        odeint::integrate_adaptive(odeint::make_controlled(1e-12, 1e-12, odeint::runge_kutta_dopri5<Vec>()), f, y, t0, t1, 1e-3);
        return y[0] - 1.0;
    };
    double s0 = 0.1, s1 = 0.2, f0 = end_value(s0), f1 = end_value(s1);
    for (int i = 0; i < 60 && std::abs(f1) > 1e-12; ++i) {
        const double s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
        s0 = s1, f0 = f1, s1 = s2, f1 = end_value(s1);
    }
    Vec ts;
    for (double x : xs) ts.push_back(std::log(x));
    Vec y{0.0, s1}, out;
    odeint::integrate_times(odeint::make_dense_output(1e-12, 1e-12, odeint::runge_kutta_dopri5<Vec>()), f, y, ts.begin(),
                            ts.end(), 1e-3, [&](const Vec& s, double) { out.push_back(s[0]); });
    return out;
}

// 5. terrible problem: both routes, oracle agreement and the crossover
Outcome criterion5() {
    Outcome o;
    const double e = std::exp(1.0);
    auto md = hsym::bcpert::most_divergent_sum(1e-4, 1.0);
    auto th = hsym::bcpert::terrible_hidden_scale(1e-4, 1.0);
    o.need(md.form == th.form, "routes differ");
    const ProblemSpec spec = load("terrible");
    auto r = hsym::cli::run_validate(spec, {});
    double err[2][3];  // [eps][series1, series2, asymptotic]
    int k = 0;
    for (double eps : {1e-4, 0.1}) {
        const std::string tab = "terrible_eps" + hsym::cli::fmt(eps);
        const Vec xs = column(r, tab, "x");
        const Vec ref = terrible_oracle(eps, xs);
        Vec exact;
        for (double x : xs) exact.push_back(std::log(e + (1 - e) * boost::math::expint(1, x) / boost::math::expint(1, eps)));
        err[k][0] = sup_diff(ref, column(r, tab, "series1"));
        err[k][1] = sup_diff(ref, column(r, tab, "series2"));
        err[k][2] = sup_diff(ref, exact);
        o.need(sup_diff(exact, column(r, tab, "asymptotic")) < 1e-12, "asymptotic form vs ln(e + (1-e)E1/E1eps)");
        ++k;
    }
    o.need(err[0][2] <= kOracleTol5, "oracle tolerance");
    o.need(err[0][2] < std::min(err[0][0], err[0][1]), "asymptotic best at 1e-4");
    o.need(err[1][1] < std::min(err[1][0], err[1][2]), "second order best at 0.1");
    o.detail << "routes equal; eps=1e-4: asymptotic " << num(err[0][2]) << " <= " << kOracleTol5 << ", series2 "
             << num(err[0][1]) << "; eps=0.1: series2 " << num(err[1][1]) << " < asymptotic " << num(err[1][2]);
    return o;
}

// 6. filament amplitude equations and the declared order
Outcome criterion6() {
    Outcome o;
    auto r = hsym::cli::run_derive(load("filament"));
    for (const char* a : {"A1", "A2"}) {
        const std::string lhs = std::string(a) + "'' = ";
        const Expr rhs = parse(line_after(r, "amplitude equations", lhs));
        o.need(rhs == parse("delta*(2*mu^2+1)*" + std::string(a) + "/16"), lhs);
        o.need(check_passed(r, "order assumption for " + std::string(a)), "order assumption");
    }
    o.detail << "A_i'' = " << line_after(r, "amplitude equations", "A1'' = ") << " (i = 1, 2); A_i' = O(delta^1/2) verified";
    return o;
}

// 7. underdamped generator and closed-form error order
Outcome criterion7() {
    Outcome o;
    const ProblemSpec base = load("underdamped");
    auto d = hsym::cli::run_derive(base);
    o.need(parse(line_after(d, "generator", "y^(1) = ")) == parse("-t*y/2"), "eta1");
    o.need(parse(line_after(d, "generator", "t^(2) = ")) == parse("s*t/4"), "xi2");
    std::vector<std::pair<double, double>> errs;
    const double A = 1.0, theta = 0.5;
    for (double eps : {0.05, 0.1, 0.2}) {
        auto spec = with(base, "params.eps", num(eps));
        spec.entries.erase("sweep.eps");
        auto r = hsym::cli::run_validate(spec, {});
        const Vec xs = column(r, "underdamped_solution", "t"), cf = column(r, "underdamped_solution", "closed_form");
        const double kappa = std::exp(-eps * eps / 8);
        const Vec y0{A * std::sin(theta), A * (kappa * std::cos(theta) - eps / 2 * std::sin(theta))};
        const Vec ref = rk4_curve(
            [eps](const Vec& y, Vec& dy, double) {
                dy[0] = y[1];
                dy[1] = -eps * y[1] - y[0];
            },
            y0, xs, 1e-4);
        errs.emplace_back(eps, sup_diff(ref, cf));
    }
    const double p = fitted_order(errs);
    o.need(p >= kOrderMin7 && p <= kOrderMax7, "order");
    o.detail << "eta1 = -t*y/2, xi2 = s*t/4; p = " << num(p) << " in [" << kOrderMin7 << ", " << kOrderMax7 << "]";
    return o;
}

// 8. Burgers closed form, PDE oracle and bare series
Outcome criterion8() {
    Outcome o;
    const double eps = 0.1;
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> ut(0.05, 20.0), ux(0.0, 5.0);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const double t = ut(rng), x = ux(rng);
        // implicit relation P(x) - P(H(u)) = eps*t*u, P(x) = x^2/2 + x, H(u) = e^u - 1
        auto g = [&](double u) {
            const double h = std::expm1(u);
            return (x * x / 2 + x) - (h * h / 2 + h) - eps * t * u;
        };
        boost::uintmax_t it = 200;
        auto br = boost::math::tools::toms748_solve(g, -50.0, std::log1p(x) + 1e-12, boost::math::tools::eps_tolerance<double>(52), it);
        const double root = (br.first + br.second) / 2;
        worst = std::max(worst, std::abs(root - hsym::pertsym::burgers_closed_form(t, x, eps)));
    }
    o.need(worst <= kClosedForm8, "closed form vs root");
    const std::vector<double> times{1.0, 10.0, 20.0};
    hsym::numlab::BurgersOptions bo;
    auto field = hsym::numlab::solve_burgers_mol([](double x) { return std::log1p(x); }, eps, times, bo);
    // the PDE oracle against characteristics: x' = 2 eps u p, u' = eps u p^2, p' = -eps p^3
    double mol_vs_char = 0;
    for (size_t k = 0; k < times.size(); ++k) {
        for (double x0 = 0.0; x0 <= 5.0; x0 += 0.05) {
            Vec y{x0, std::log1p(x0), 1 / (1 + x0)};
            odeint::integrate_adaptive(
                odeint::make_controlled(1e-12, 1e-12, odeint::runge_kutta_dopri5<Vec>()),
                [eps](const Vec& s, Vec& d, double) {
                    d[0] = 2 * eps * s[1] * s[2];
                    d[1] = eps * s[1] * s[2] * s[2];
                    d[2] = -eps * s[2] * s[2] * s[2];
                },
                y, 0.0, times[k], 1e-3);
            if (y[0] < 5.0) mol_vs_char = std::max(mol_vs_char, std::abs(field.at(k, y[0]) - y[1]));
        }
    }
    o.need(mol_vs_char < 1e-4, "method of lines vs characteristics");
    double sym[3], bare[3];
    for (size_t k = 0; k < times.size(); ++k) {
        sym[k] = bare[k] = 0;
        for (size_t i = 0; i < field.x.size(); ++i) {
            const double x = field.x[i], u = field.u[k][i];
            sym[k] = std::max(sym[k], std::abs(hsym::pertsym::burgers_closed_form(times[k], x, eps) - u));
            bare[k] = std::max(bare[k], std::abs(hsym::pertsym::burgers_bare(times[k], x, eps) - u));
        }
        o.need(sym[k] <= kSup8, "sup error at t=" + num(times[k]));
    }
    const double ratio = bare[2] / sym[2];
    o.need(ratio >= kBareRatio8, "bare/symmetry at t=20");
    o.detail << "closed form vs root " << num(worst) << "; sup errors " << num(sym[0]) << ", " << num(sym[1]) << ", "
             << num(sym[2]) << " <= " << kSup8 << "; bare/symmetry at t=20 " << num(ratio) << " >= " << kBareRatio8
             << "; oracle vs characteristics " << num(mol_vs_char);
    return o;
}

// 9. kernel property suite
Outcome criterion9() {
    Outcome o;
    auto a = hsym::testsupport::algebraic_properties(20240611, kAlgebraic9);
    auto f = hsym::testsupport::finite_difference_properties(20240612, kFd9, kFdRel9);
    o.need(a.ring == kAlgebraic9 && a.derivation == kAlgebraic9 && a.round_trip == kAlgebraic9, "algebraic");
    o.need(f.finite_difference == kFd9, "finite differences");
    for (const auto& m : a.failures) o.detail << "(" << m << ") ";
    for (const auto& m : f.failures) o.detail << "(" << m << ") ";
    o.detail << a.ring << " ring, " << a.derivation << " derivation, " << a.round_trip << " round-trip checks; " << f.finite_difference
             << "/" << kFd9 << " fd checks, worst rel " << num(f.worst_fd_rel);
    return o;
}

const char* titles[10] = {"",
                          "overdamped closed form",
                          "overdamped error scaling",
                          "Mathieu FT equations",
                          "KdV strained coordinate",
                          "terrible problem",
                          "filament amplitude equations",
                          "underdamped perturbation symmetry",
                          "Burgers",
                          "kernel property suite"};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> only;
    app.add_option("--only", only, "criteria to run (default: all)")->check(CLI::Range(1, 9));
    app.add_option("--corpus", corpus_dir, "corpus directory");
    CLI11_PARSE(app, argc, argv);
    if (only.empty()) only = {1, 2, 3, 4, 5, 6, 7, 8, 9};

    std::function<Outcome()> run[10] = {nullptr,     criterion1, criterion2, criterion3, criterion4,
                                        criterion5,  criterion6, criterion7, criterion8, criterion9};
    int failed = 0;
    for (int c : only) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run[c]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.need(secs < kLimit[c], "runtime");
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.2f s < %g s", secs, kLimit[c]);
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c << " " << titles[c] << ": " << o.detail.str() << " ["
                  << timing << "]\n";
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
