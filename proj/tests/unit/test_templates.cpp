#include <doctest.h>

#include <cmath>

#include "pacmc/error.hpp"
#include "pacmc/rng.hpp"
#include "pacmc/templates.hpp"

using namespace pacmc;

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return static_cast<std::size_t>(std::llround(r));
}

std::vector<double> random_vector(RandomStream& r, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = r.uniform(-scale, scale);
  return v;
}

}  // namespace

TEST_CASE("polynomial time templates") {
  CHECK(ModelTemplate::poly_time(6).size() == 7);
  CHECK(ModelTemplate::poly_time(6).decision_dims() == 8);
  CHECK(ModelTemplate::poly_time(2).decision_dims() == 4);
  const auto constant = ModelTemplate::poly_time(0);
  const std::vector<double> c{2.5};
  CHECK(constant.evaluate(c, {}, 7.0) == 2.5);
  CHECK(constant.input_dimension() == 0);
  CHECK_FALSE(constant.is_input_dependent());
}

TEST_CASE("input-dependent basis sizes follow the binomial count") {
  CHECK(ModelTemplate::poly_input_time(2, 6).decision_dims() == 85);
  CHECK(ModelTemplate::poly_input_time(2, 4).decision_dims() == 36);
  for (std::size_t n = 1; n <= 9; ++n) {
    for (int d = 0; d <= 6; ++d) {
      const auto t = ModelTemplate::poly_input_time(n, d);
      CHECK(t.size() == binomial(n + 1 + static_cast<std::size_t>(d), static_cast<std::size_t>(d)));
      CHECK(t.size() == monomial_count(n, d));
    }
  }
}

TEST_CASE("monomials are in graded lexicographic order") {
  const auto t = ModelTemplate::poly_input_time(2, 1);
  const std::vector<std::vector<int>> want{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  CHECK(t.exponents() == want);
  const auto t2 = ModelTemplate::poly_input_time(1, 2);
  const std::vector<std::vector<int>> want2{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  CHECK(t2.exponents() == want2);
}

TEST_CASE("evaluation is linear in the coefficients") {
  RandomStream r(1, "lin");
  const auto t = ModelTemplate::poly_input_time(2, 3, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_vector(r, t.size());
    const auto b = random_vector(r, t.size());
    const double alpha = r.uniform(-3, 3);
    std::vector<double> mix(t.size());
    for (std::size_t l = 0; l < mix.size(); ++l) mix[l] = alpha * a[l] + b[l];
    const auto x0 = random_vector(r, 2, 2.0);
    const double s = r.uniform(0, 10);
    const double lhs = t.evaluate(mix, x0, s);
    const double rhs = alpha * t.evaluate(a, x0, s) + t.evaluate(b, x0, s);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("time scaling changes the basis, not the function class") {
  const auto scaled = ModelTemplate::poly_time(3, 10.0);
  const std::vector<double> c{1.0, -2.0, 0.5, 0.25};
  LearnedModel m{scaled, c, 0.0, {}};
  const auto raw = m.raw_coefficients();
  const auto plain = ModelTemplate::poly_time(3);
  for (double t : {0.0, 1.0, 4.5, 10.0}) {
    CHECK(plain.evaluate(raw, {}, t) == doctest::Approx(scaled.evaluate(c, {}, t)).epsilon(1e-13));
  }
  CHECK(scaled.coefficient_scale(3) == 1000.0);
}

TEST_CASE("restriction to an input matches full evaluation") {
  RandomStream r(2, "restrict");
  const auto t = ModelTemplate::poly_input_time(3, 4, 2.0);
  const auto c = random_vector(r, t.size());
  const auto x0 = random_vector(r, 3);
  const auto p = t.restrict_to_input(c, x0);
  CHECK(p.size() == 5);
  for (double time : {0.0, 0.3, 1.7, 2.0}) {
    double s = time / 2.0, v = 0.0, pw = 1.0;
    for (double a : p) {
      v += a * pw;
      pw *= s;
    }
    CHECK(v == doctest::Approx(t.evaluate(c, x0, time)).epsilon(1e-12));
  }
}

TEST_CASE("interval evaluation encloses point evaluations") {
  RandomStream r(3, "enclose");
  const auto t = ModelTemplate::poly_input_time(2, 4, 10.0);
  const auto c = random_vector(r, t.size(), 5.0);
  const std::vector<Interval> box{{-6.0, -4.0}, {-6.0, -4.0}};
  const Interval time{2.0, 3.0};
  const Interval enc = t.evaluate_interval(c, box, time);
  for (int i = 0; i < 5000; ++i) {
    const std::vector<double> x0{r.uniform(-6, -4), r.uniform(-6, -4)};
    const double v = t.evaluate(c, x0, r.uniform(2, 3));
    CHECK(enc.lo <= v);
    CHECK(v <= enc.hi);
  }
}

TEST_CASE("freezing keeps the function and leaves one free slot") {
  RandomStream r(4, "freeze");
  const auto base = ModelTemplate::poly_input_time(2, 2, 10.0);
  const auto c = random_vector(r, base.size());
  const auto frozen = freeze(base, c);
  CHECK(frozen.size() == 1);
  CHECK(frozen.free_coefficient_count() == 0);
  CHECK(frozen.decision_dims() == 1);
  CHECK(frozen.is_input_dependent());
  const std::vector<double> one{1.0};
  const std::vector<double> x0{0.3, -0.7};
  CHECK(frozen.evaluate(one, x0, 4.0) == base.evaluate(c, x0, 4.0));
  CHECK(frozen.restrict_to_input(one, x0) == base.restrict_to_input(c, x0));
}

TEST_CASE("custom templates evaluate but refuse polynomial operations") {
  const auto t = ModelTemplate::custom(
      "exp", 2, {[](std::span<const double> x, double tt) { return std::exp(x[0] * x[1]) * tt; },
                 [](std::span<const double>, double) { return 1.0; }});
  CHECK_FALSE(t.is_polynomial());
  const std::vector<double> c{1.0, 2.0};
  const std::vector<double> x0{0.0, 5.0};
  CHECK(t.evaluate(c, x0, 3.0) == 5.0);
  CHECK_THROWS_AS(t.restrict_to_input(c, x0), ContractError);
  CHECK_THROWS_AS(t.evaluate(std::vector<double>{1.0}, x0, 1.0), ContractError);
}
