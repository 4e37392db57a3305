#pragma once

#include "doctest.h"
#include "hsym/exprcore.hpp"

namespace doctest {
template <> struct StringMaker<hsym::exprcore::Expr> {
    static String convert(const hsym::exprcore::Expr& e) { return hsym::exprcore::print(e).c_str(); }
};
} // namespace doctest
