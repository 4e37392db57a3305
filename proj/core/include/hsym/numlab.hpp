#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hsym::numlab {

using State = std::vector<double>;
using Rhs = std::function<void(double t, const State& y, State& dydt)>;

enum class Method { RK4Fixed, RK45Adaptive };

struct IVPOptions {
    Method method = Method::RK45Adaptive;
    double step = 1e-3;        // fixed step, or initial step for rk45
    double rtol = 1e-10;
    double atol = 1e-12;
    double min_step = 1e-13;
    std::size_t max_steps = 20'000'000;
};

struct IVPSolution {
    std::vector<double> t;       // strictly monotone (increasing or decreasing)
    std::vector<State> y;
    std::vector<State> dy;       // rhs at the nodes, for Hermite interpolation

    std::size_t dim() const { return y.empty() ? 0 : y.front().size(); }
    const State& final_state() const { return y.back(); }
    State at(double s) const;    // cubic Hermite dense output
    double at(double s, std::size_t component) const;
};

// Integrates from t0 to t1 (t1 < t0 allowed). Throws std::runtime_error on step
// underflow or a non-finite right-hand side.
IVPSolution solve_ivp(const Rhs& rhs, State y0, double t0, double t1, const IVPOptions& opts = {});

struct ShootingOptions {
    double slope0 = 0.0;
    double slope1 = 1.0;
    std::optional<std::pair<double, double>> bracket;  // slope bracket; enables bracketing solve
    double tol = 1e-10;
    int max_iter = 100;
    IVPOptions ivp{};
};

struct BVPSolution {
    IVPSolution profile;
    double slope = 0.0;
    double miss = 0.0;   // |y(x_right) - value_right|
    int iterations = 0;
};

// Two-point problem for y'' = f(x, y, y') written as a 2-component first-order rhs.
BVPSolution solve_bvp_shooting(const Rhs& rhs, double x_left, double value_left, double x_right, double value_right,
                               const ShootingOptions& opts = {});

struct BurgersOptions {
    double x_min = 0.0;
    double x_max = 5.0;
    int cells = 200;
    double rtol = 1e-10;
    double atol = 1e-12;
    double richardson_tol = 1e-4;
    int max_refinements = 2;
};

struct BurgersField {
    std::vector<double> x;                  // grid of the finer run
    std::vector<double> times;
    std::vector<std::vector<double>> u;     // u[time][node]
    double richardson_diff = 0.0;
    int cells = 0;
    double at(std::size_t time_index, double xq) const;  // cubic interpolation on the grid
};

// Method of lines for u_t + eps*u*u_x^2 = 0. Accepts the finer of two grids (h, h/2)
// once they agree to richardson_tol in sup norm; otherwise refines, then throws.
BurgersField solve_burgers_mol(const std::function<double(double)>& u0, double eps, const std::vector<double>& times,
                               const BurgersOptions& opts = {});

struct ErrorRow {
    double x;
    double reference;
    double approx;
    double error;
};

struct ErrorReport {
    double sup_error = 0.0;
    double l2_error = 0.0;    // root-mean-square over the table
    std::vector<ErrorRow> table;
    std::map<std::string, double> parameters;
    std::string oracle;
};

ErrorReport compare(const std::vector<double>& xs, const std::vector<double>& reference,
                    const std::vector<double>& approx);

// Least-squares slope of log(err) against log(eps). Needs at least 3 positive points.
double convergence_order(const std::vector<std::pair<double, double>>& errors);

// Central finite-difference derivative of order n (1..4) with step h.
double fd_derivative(const std::function<double(double)>& f, double x, int n, double h);

std::vector<double> linspace(double a, double b, std::size_t n);
std::vector<double> logspace(double a, double b, std::size_t n);  // geometric from a to b

} // namespace hsym::numlab
