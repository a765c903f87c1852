#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace pacmc {

// Closed interval with outward rounding: every operation widens its result
// by one ulp on each side, so the true real-valued result is enclosed.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  constexpr Interval(double v) : lo(v), hi(v) {}  // NOLINT: implicit from scalar
  constexpr Interval(double l, double h) : lo(l), hi(h) {}

  double width() const { return hi - lo; }
  double mid() const { return lo + 0.5 * (hi - lo); }
  bool contains(double v) const { return lo <= v && v <= hi; }
};

namespace interval_detail {
inline double down(double v) { return std::nextafter(v, -std::numeric_limits<double>::infinity()); }
inline double up(double v) { return std::nextafter(v, std::numeric_limits<double>::infinity()); }

// |a|^n rounded up / down for a >= 0.
inline double pow_up(double a, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r = up(r * a);
  return r;
}
inline double pow_down(double a, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r = std::max(0.0, down(r * a));
  return r;
}
}  // namespace interval_detail

inline Interval operator+(Interval a, Interval b) {
  return {interval_detail::down(a.lo + b.lo), interval_detail::up(a.hi + b.hi)};
}

inline Interval operator-(Interval a) { return {-a.hi, -a.lo}; }

inline Interval operator-(Interval a, Interval b) { return a + (-b); }

inline Interval operator*(Interval a, Interval b) {
  const double p1 = a.lo * b.lo;
  const double p2 = a.lo * b.hi;
  const double p3 = a.hi * b.lo;
  const double p4 = a.hi * b.hi;
  return {interval_detail::down(std::min(std::min(p1, p2), std::min(p3, p4))),
          interval_detail::up(std::max(std::max(p1, p2), std::max(p3, p4)))};
}

inline Interval hull(Interval a, Interval b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

// x^n with the exact image for even powers of intervals straddling zero.
inline Interval pow(Interval x, int n) {
  using namespace interval_detail;
  if (n == 0) return {1.0, 1.0};
  if (x.lo >= 0.0) return {pow_down(x.lo, n), pow_up(x.hi, n)};
  if (x.hi <= 0.0) {
    if (n % 2 == 0) return {pow_down(-x.hi, n), pow_up(-x.lo, n)};
    return {-pow_up(-x.lo, n), -pow_down(-x.hi, n)};
  }
  if (n % 2 == 0) return {0.0, pow_up(std::max(-x.lo, x.hi), n)};
  return {-pow_up(-x.lo, n), pow_up(x.hi, n)};
}

}  // namespace pacmc
