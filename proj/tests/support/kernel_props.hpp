#pragma once

#include "hsym/exprcore.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace hsym::testsupport {

using exprcore::Expr;

// Random sums of c * x^i * a^j * exp(r*x) * (cos|sin)(w*x + b) with small rationals.
class ExprGen {
public:
    explicit ExprGen(std::uint64_t seed) : rng_(seed) {}

    Expr term(bool laurent = true);
    Expr expr(int max_terms, bool laurent = true);
    // Polynomial in eps with random coefficients, degree <= max_deg.
    Expr eps_poly(int max_deg, int max_terms);
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::mt19937_64& rng() { return rng_; }

private:
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    std::mt19937_64 rng_;
};

struct PropertyTally {
    long ring = 0;
    long derivation = 0;
    long round_trip = 0;
    long finite_difference = 0;
    double worst_fd_rel = 0.0;
    std::vector<std::string> failures;

    long algebraic() const { return ring + derivation + round_trip; }
};

// `cases` iterations, each running one ring, one derivation and one round-trip check.
PropertyTally algebraic_properties(std::uint64_t seed, int cases);
// diff against Richardson-extrapolated central differences at random points.
PropertyTally finite_difference_properties(std::uint64_t seed, int cases, double rel_tol);

} // namespace hsym::testsupport
