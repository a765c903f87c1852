#pragma once

#include <span>
#include <vector>

#include "pacmc/interval.hpp"

// Univariate polynomials, coefficients in ascending powers.
namespace pacmc::poly {

double eval(std::span<const double> c, double s);
// Horner in interval arithmetic: encloses p over s.
Interval eval(std::span<const double> c, Interval s);

std::vector<double> derivative(std::span<const double> c);

// Drops trailing zero coefficients (keeps at least one).
std::vector<double> trimmed(std::span<const double> c);

struct Bracket {
  double lo;
  double hi;
};

// Brackets of width <= tol around every sign change of p in [lo, hi],
// plus degenerate brackets at points where p evaluates to exactly zero.
// Found by recursing on p' so that p is monotone between consecutive
// critical brackets. Sorted and disjoint.
std::vector<Bracket> roots(std::span<const double> c, double lo, double hi, double tol);

// Enclosure of p over [lo, hi]: endpoints and critical brackets evaluated in
// interval arithmetic.
Interval range(std::span<const double> c, double lo, double hi, double tol);

}  // namespace pacmc::poly
