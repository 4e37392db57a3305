#pragma once

#include "hsym/exprcore.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsym::cli {

class SpecError : public std::runtime_error {
public:
    SpecError(const std::string& origin, int line, const std::string& msg)
        : std::runtime_error(origin + ":" + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

enum class ProblemKind { OdeHiddenScale, Switchback, PerturbationSymmetry, Burgers };

std::string kind_name(ProblemKind k);

struct SpecValue {
    std::string text;
    int line = 0;
};

struct ProblemSpec {
    std::string origin;                       // path or "<string>"
    std::string hash;                         // FNV-1a of the file bytes, 16 hex digits
    std::string name;
    ProblemKind kind = ProblemKind::OdeHiddenScale;
    std::map<std::string, SpecValue> entries; // "section.key" -> value

    // ode-hidden-scale and perturbation-symmetry
    std::string var = "x", dep = "y", param = "eps";
    std::vector<std::string> parameters, constants, functions;

    bool has(const std::string& key) const { return entries.count(key) > 0; }
    std::string str(const std::string& key, const std::string& fallback = "") const;
    double number(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    int integer(const std::string& key, int fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::vector<std::string> list(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;
    exprcore::Expr expr(const std::string& key) const;
    // "a:b:n" grid
    std::vector<double> grid(const std::string& key) const;
    // "sym:p/q" pairs
    std::map<std::string, exprcore::Q> rationals(const std::string& key) const;

    // params.<sym> for every declared parameter with a value
    std::map<std::string, double> parameter_values() const;
    // ics.<dep with primes> -> (derivative order, value)
    std::vector<std::pair<int, double>> initial_conditions() const;

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const;
};

ProblemSpec parse_spec_text(const std::string& text, const std::string& origin = "<string>");
ProblemSpec parse_spec(const std::string& path);

std::string fnv1a_hex(const std::string& bytes);

// Strict decimal parse of the whole string; nullopt on anything else.
std::optional<double> parse_number(const std::string& s);

} // namespace hsym::cli
