#include "hsym/numlab.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hsym::numlab {

namespace odeint = boost::numeric::odeint;

namespace {

void check_finite(const State& v, double t) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::runtime_error("non-finite right-hand side at t=" + std::to_string(t));
}

struct System {
    const Rhs& rhs;
    void operator()(const State& y, State& dydt, double t) const {
        rhs(t, y, dydt);
        check_finite(dydt, t);
    }
};

} // namespace

State IVPSolution::at(double s) const {
    if (t.empty()) throw std::logic_error("empty solution");
    const bool inc = t.back() >= t.front();
    auto less = [inc](double a, double b) { return inc ? a < b : a > b; };
    if (less(s, t.front()) || less(t.back(), s)) {
        double span = std::abs(t.back() - t.front());
        if (std::abs(s - t.front()) > 1e-12 * (1 + span) && std::abs(s - t.back()) > 1e-12 * (1 + span))
            throw std::out_of_range("dense output outside the integration interval");
        return less(s, t.front()) || s == t.front() ? y.front() : y.back();
    }
    auto it = inc ? std::upper_bound(t.begin(), t.end(), s) : std::upper_bound(t.begin(), t.end(), s, std::greater<>());
    std::size_t i = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
    if (i + 1 >= t.size()) return y.back();
    if (s == t[i]) return y[i];
    const double h = t[i + 1] - t[i];
    const double th = (s - t[i]) / h;
    const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
    const double h10 = th * (1 - th) * (1 - th);
    const double h01 = th * th * (3 - 2 * th);
    const double h11 = th * th * (th - 1);
    State out(dim());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = h00 * y[i][k] + h10 * h * dy[i][k] + h01 * y[i + 1][k] + h11 * h * dy[i + 1][k];
    return out;
}

double IVPSolution::at(double s, std::size_t component) const { return at(s)[component]; }

IVPSolution solve_ivp(const Rhs& rhs, State y0, double t0, double t1, const IVPOptions& opts) {
    System sys{rhs};
    IVPSolution sol;
    State d(y0.size());
    auto record = [&](double t, const State& y) {
        sys(y, d, t);
        sol.t.push_back(t);
        sol.y.push_back(y);
        sol.dy.push_back(d);
    };
    check_finite(y0, t0);
    record(t0, y0);
    if (t1 == t0) return sol;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);

    if (opts.method == Method::RK4Fixed) {
        if (!(opts.step > 0)) throw std::invalid_argument("rk4 step must be positive");
        odeint::runge_kutta4<State> stepper;
        auto n = static_cast<std::size_t>(std::ceil(span / opts.step - 1e-9));
        if (n > opts.max_steps) throw std::runtime_error("rk4: too many steps");
        double t = t0;
        for (std::size_t i = 0; i < n; ++i) {
            double h = dir * std::min(opts.step, std::abs(t1 - t));
            stepper.do_step(sys, y0, t, h);
            t = (i + 1 == n) ? t1 : t + h;
            record(t, y0);
        }
        return sol;
    }

    auto ctrl = odeint::make_controlled(opts.atol, opts.rtol, odeint::runge_kutta_dopri5<State>());
    double t = t0;
    double h = dir * std::min(opts.step, span);
    std::size_t steps = 0;
    while (dir * (t1 - t) > 0) {
        if (dir * (t + h - t1) > 0) h = t1 - t;
        auto res = ctrl.try_step(sys, y0, t, h);
        if (res == odeint::success) {
            if (std::abs(t1 - t) < 1e-14 * (1 + span)) t = t1;
            record(t, y0);
            if (++steps > opts.max_steps) throw std::runtime_error("rk45: too many steps");
        } else if (std::abs(h) < opts.min_step) {
            throw std::runtime_error("rk45: step size underflow at t=" + std::to_string(t));
        }
    }
    return sol;
}

BVPSolution solve_bvp_shooting(const Rhs& rhs, double x_left, double value_left, double x_right, double value_right,
                               const ShootingOptions& opts) {
    int evals = 0;
    auto miss = [&](double slope) {
        ++evals;
        auto s = solve_ivp(rhs, {value_left, slope}, x_left, x_right, opts.ivp);
        return s.final_state()[0] - value_right;
    };
    double slope;
    if (opts.bracket) {
        auto [a, b] = *opts.bracket;
        double fa = miss(a), fb = miss(b);
        if (fa * fb > 0) throw std::runtime_error("shooting: bracket does not enclose a root");
        std::uintmax_t iters = static_cast<std::uintmax_t>(opts.max_iter);
        auto r = boost::math::tools::toms748_solve(miss, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52),
                                                   iters);
        slope = std::abs(miss(r.first)) <= std::abs(miss(r.second)) ? r.first : r.second;
    } else {
        double s0 = opts.slope0, s1 = opts.slope1;
        double f0 = miss(s0), f1 = miss(s1);
        int it = 0;
        while (std::abs(f1) > opts.tol) {
            if (++it > opts.max_iter) throw std::runtime_error("shooting: no convergence in max_iter iterations");
            if (f1 == f0) throw std::runtime_error("shooting: secant stalled");
            double s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
            s0 = s1;
            f0 = f1;
            s1 = s2;
            f1 = miss(s1);
        }
        slope = s1;
    }
    BVPSolution out;
    out.profile = solve_ivp(rhs, {value_left, slope}, x_left, x_right, opts.ivp);
    out.slope = slope;
    out.miss = std::abs(out.profile.final_state()[0] - value_right);
    out.iterations = evals;
    if (out.miss > opts.tol) throw std::runtime_error("shooting: right boundary missed by " + std::to_string(out.miss));
    return out;
}

namespace {

std::vector<std::vector<double>> burgers_run(const std::function<double(double)>& u0, double eps,
                                             const std::vector<double>& times, const BurgersOptions& o, int cells,
                                             std::vector<double>& x) {
    x = linspace(o.x_min, o.x_max, static_cast<std::size_t>(cells) + 1);
    const double h = x[1] - x[0];
    State u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = u0(x[i]);
    const std::size_t n = x.size();
    auto sys = [&](const State& v, State& dv, double) {
        for (std::size_t i = 0; i < n; ++i) {
            double ux;
            if (i == 0) ux = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h);
            else if (i == n - 1) ux = (3 * v[n - 1] - 4 * v[n - 2] + v[n - 3]) / (2 * h);
            else ux = (v[i + 1] - v[i - 1]) / (2 * h);
            dv[i] = -eps * v[i] * ux * ux;
        }
    };
    std::vector<double> ts{0.0};
    for (double t : times) {
        if (t < ts.back()) throw std::invalid_argument("burgers: times must be increasing");
        ts.push_back(t);
    }
    std::vector<std::vector<double>> out;
    auto observer = [&](const State& v, double t) {
        for (double z : v)
            if (!std::isfinite(z)) throw std::runtime_error("burgers: non-finite field at t=" + std::to_string(t));
        out.push_back(v);
    };
    odeint::integrate_times(odeint::make_controlled(o.atol, o.rtol, odeint::runge_kutta_dopri5<State>()), sys, u,
                            ts.begin(), ts.end(), 1e-3, observer);
    out.erase(out.begin());
    return out;
}

} // namespace

BurgersField solve_burgers_mol(const std::function<double(double)>& u0, double eps, const std::vector<double>& times,
                               const BurgersOptions& opts) {
    int cells = opts.cells;
    std::vector<double> xc, xf;
    auto coarse = burgers_run(u0, eps, times, opts, cells, xc);
    for (int r = 0; r <= opts.max_refinements; ++r) {
        auto fine = burgers_run(u0, eps, times, opts, 2 * cells, xf);
        double diff = 0;
        for (std::size_t k = 0; k < times.size(); ++k)
            for (std::size_t i = 0; i < xc.size(); ++i) diff = std::max(diff, std::abs(coarse[k][i] - fine[k][2 * i]));
        if (diff <= opts.richardson_tol) {
            BurgersField f;
            f.x = xf;
            f.times = times;
            f.u = std::move(fine);
            f.richardson_diff = diff;
            f.cells = 2 * cells;
            return f;
        }
        cells *= 2;
        coarse = std::move(fine);
        xc = xf;
    }
    throw std::runtime_error("burgers: Richardson check failed after refinement");
}

double BurgersField::at(std::size_t k, double xq) const {
    const auto& v = u.at(k);
    const double h = x[1] - x[0];
    double s = (xq - x.front()) / h;
    auto i = static_cast<long>(std::floor(s));
    i = std::clamp<long>(i - 1, 0, static_cast<long>(x.size()) - 4);
    double r = 0;
    for (long a = i; a < i + 4; ++a) {
        double w = 1;
        for (long b = i; b < i + 4; ++b)
            if (b != a) w *= (xq - x[b]) / (x[a] - x[b]);
        r += w * v[a];
    }
    return r;
}

ErrorReport compare(const std::vector<double>& xs, const std::vector<double>& reference,
                    const std::vector<double>& approx) {
    if (xs.size() != reference.size() || xs.size() != approx.size())
        throw std::invalid_argument("compare: size mismatch");
    ErrorReport r;
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double e = std::abs(approx[i] - reference[i]);
        r.table.push_back({xs[i], reference[i], approx[i], e});
        r.sup_error = std::max(r.sup_error, e);
        ss += e * e;
    }
    r.l2_error = xs.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(xs.size()));
    return r;
}

double convergence_order(const std::vector<std::pair<double, double>>& errors) {
    if (errors.size() < 3) throw std::invalid_argument("convergence_order needs at least 3 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(errors.size());
    for (auto [e, err] : errors) {
        if (!(e > 0) || !(err > 0)) throw std::invalid_argument("convergence_order needs positive values");
        double lx = std::log(e), ly = std::log(err);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double fd_derivative(const std::function<double(double)>& f, double x, int n, double h) {
    switch (n) {
    case 1: return (f(x + h) - f(x - h)) / (2 * h);
    case 2: return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
    case 3: return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2 * h * h * h);
    case 4: return (f(x + 2 * h) - 4 * f(x + h) + 6 * f(x) - 4 * f(x - h) + f(x - 2 * h)) / (h * h * h * h);
    default: throw std::invalid_argument("fd_derivative supports orders 1..4");
    }
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    v.back() = b;
    return v;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
    auto e = linspace(std::log(a), std::log(b), n);
    for (auto& v : e) v = std::exp(v);
    if (n > 0) {
        e.front() = a;
        e.back() = b;
    }
    return e;
}

} // namespace hsym::numlab
