#include "pacmc/polynomial.hpp"

#include <algorithm>

namespace pacmc::poly {
namespace {

int sign(double v) { return (v > 0.0) - (v < 0.0); }

Bracket bisect(std::span<const double> c, double a, double b, double fa, double tol) {
  while (b - a > tol) {
    const double m = a + 0.5 * (b - a);
    if (m <= a || m >= b) break;
    const double fm = eval(c, m);
    if (fm == 0.0) return {m, m};
    if (sign(fm) == sign(fa)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return {a, b};
}

void push_merged(std::vector<Bracket>& out, Bracket b) {
  if (!out.empty() && b.lo <= out.back().hi) {
    out.back().hi = std::max(out.back().hi, b.hi);
    return;
  }
  out.push_back(b);
}

}  // namespace

double eval(std::span<const double> c, double s) {
  double v = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * s + c[i];
  return v;
}

Interval eval(std::span<const double> c, Interval s) {
  Interval v(0.0);
  for (std::size_t i = c.size(); i-- > 0;) v = v * s + Interval(c[i]);
  return v;
}

std::vector<double> derivative(std::span<const double> c) {
  if (c.size() <= 1) return {0.0};
  std::vector<double> d(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
  return d;
}

std::vector<double> trimmed(std::span<const double> c) {
  std::size_t n = c.size();
  while (n > 1 && c[n - 1] == 0.0) --n;
  if (n == 0) return {0.0};
  return {c.begin(), c.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::vector<Bracket> roots(std::span<const double> coeffs, double lo, double hi, double tol) {
  const std::vector<double> c = trimmed(coeffs);
  std::vector<Bracket> out;
  if (c.size() == 1) return out;  // constant: no isolated roots

  // Breakpoints: lo, critical bracket ends, hi.
  std::vector<double> pts{lo};
  if (c.size() > 2) {
    const std::vector<double> d = derivative(c);
    for (const Bracket& b : roots(d, lo, hi, tol)) {
      pts.push_back(b.lo);
      pts.push_back(b.hi);
    }
  }
  pts.push_back(hi);

  std::vector<double> f(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) f[k] = eval(c, pts[k]);
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    if (f[k] == 0.0) push_merged(out, {pts[k], pts[k]});
    if (sign(f[k]) * sign(f[k + 1]) < 0) {
      push_merged(out, bisect(c, pts[k], pts[k + 1], f[k], tol));
    }
  }
  if (f.back() == 0.0) push_merged(out, {pts.back(), pts.back()});
  return out;
}

Interval range(std::span<const double> coeffs, double lo, double hi, double tol) {
  const std::vector<double> c = trimmed(coeffs);
  Interval r = hull(eval(c, Interval(lo)), eval(c, Interval(hi)));
  if (c.size() > 2) {
    for (const Bracket& b : roots(derivative(c), lo, hi, tol)) {
      r = hull(r, eval(c, Interval(b.lo, b.hi)));
    }
  }
  return r;
}

}  // namespace pacmc::poly
