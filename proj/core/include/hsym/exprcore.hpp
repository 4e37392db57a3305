#pragma once

#include "hsym/exprcore/expr.hpp"
#include "hsym/exprcore/linsolve.hpp"
#include "hsym/exprcore/number.hpp"
#include "hsym/exprcore/poly.hpp"
#include "hsym/exprcore/series.hpp"
#include "hsym/exprcore/text.hpp"
