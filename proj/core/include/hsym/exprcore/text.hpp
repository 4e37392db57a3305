#pragma once

#include "hsym/exprcore/expr.hpp"

#include <stdexcept>
#include <string>

namespace hsym::exprcore {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), pos_(pos) {}
    size_t position() const { return pos_; }

private:
    size_t pos_;
};

// Grammar:  sum := prod (('+'|'-') prod)* ; prod := unary (('*'|'/') unary)*
//           unary := ('-'|'+') unary | pow ; pow := atom ('^' int | '^(' int ')')?
//           atom := number | ident | fn '(' sum ')' | '(' sum ')'
// fn is exp, sin or cos; I is the imaginary unit; identifiers may end in "~" and primes.
Expr parse(const std::string& text);

// Deterministic text form. Real expressions print with cos/sin, others with complex
// coefficients. parse(print(e)) == e.
std::string print(const Expr& e);

// Coefficient-times-factors form: "3*A*tau/16", "-A/16", "2".
std::string format_product(const Q& c, const std::string& factors);

} // namespace hsym::exprcore
