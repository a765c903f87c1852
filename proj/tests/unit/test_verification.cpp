#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pacmc/error.hpp"
#include "pacmc/verification.hpp"

using namespace pacmc;

namespace {

LearnedModel time_model(std::vector<double> c, double xi, double scale = 1.0) {
  const int degree = static_cast<int>(c.size()) - 1;
  return LearnedModel{ModelTemplate::poly_time(degree, scale), std::move(c), xi, {}};
}

const VerificationScope kOne = VerificationScope::one({});

}  // namespace

TEST_CASE("unsafe sets parse and normalise") {
  const auto u = UnsafeSet::parse("y>=3; [1, 2]; [1.5, 2.5]");
  REQUIRE(u.pieces().size() == 2);
  CHECK(u.pieces()[0].lo == 1.0);
  CHECK(u.pieces()[0].hi == 2.5);
  CHECK(u.contains(3.0));
  CHECK_FALSE(u.contains(2.9));
  CHECK(u.intersects(2.6, 3.1));
  CHECK(UnsafeSet::parse("none").empty());
  CHECK(UnsafeSet::parse("").empty());
  CHECK(UnsafeSet::parse("y<=-1").contains(-5.0));
  CHECK_THROWS_AS(UnsafeSet::parse("y>3"), ConfigError);
  CHECK_THROWS_AS(UnsafeSet::parse("[a, 2]"), ConfigError);
}

TEST_CASE("tube range of simple polynomials") {
  auto r = tube_range(time_model({2.0}, 0.3), kOne, 10.0);
  CHECK(r.low == doctest::Approx(1.7));
  CHECK(r.high == doctest::Approx(2.3));
  CHECK(r.rigor == Rigor::Certified);

  r = tube_range(time_model({0.0, 1.0}, 0.0), kOne, 10.0);
  CHECK(r.low == doctest::Approx(0.0));
  CHECK(r.high == doctest::Approx(10.0));

  r = tube_range(time_model({0.0, 10.0, -1.0}, 1.0), kOne, 10.0);
  CHECK(r.low <= -1.0);
  CHECK(r.low >= -1.0 - 1e-6);
  CHECK(r.high >= 26.0);
  CHECK(r.high <= 26.0 + 1e-6);

  // Same curve in scaled time.
  r = tube_range(time_model({0.0, 100.0, -100.0}, 1.0, 10.0), kOne, 10.0);
  CHECK(r.low == doctest::Approx(-1.0));
  CHECK(r.high == doctest::Approx(26.0));
}

TEST_CASE("unsafe time of z = t against y >= 9") {
  const auto m = time_model({0.0, 1.0}, 0.0);
  const auto ut = unsafe_time_budget(m, UnsafeSet::at_least(9.0), kOne, 10.0, 0.01);
  CHECK(ut.tau >= 1.0);
  CHECK(ut.tau <= 1.0 + 1e-6);
  CHECK(ut.bound == doctest::Approx(0.1 + ut.tau));
  CHECK(ut.rigor == Rigor::Certified);

  // Tube inside Uns the whole time.
  CHECK(unsafe_time_budget(m, UnsafeSet::at_least(-5.0), kOne, 10.0, 0.01).tau ==
        doctest::Approx(10.0));
  // Tube disjoint from Uns.
  const auto none = unsafe_time_budget(m, UnsafeSet::at_least(20.0), kOne, 10.0, 0.01);
  CHECK(none.tau <= 1e-6);
  CHECK(none.bound == doctest::Approx(0.1).epsilon(1e-4));
}

TEST_CASE("tau never shrinks when Uns grows") {
  const auto m = time_model({0.5, 3.0, -1.2, 0.1}, 0.2);
  const std::vector<UnsafeSet> nested{
      UnsafeSet::at_least(3.0), UnsafeSet::parse("y>=2.5"), UnsafeSet::parse("y>=2.5; [0, 1]"),
      UnsafeSet::parse("y>=1; y<=1.5"), UnsafeSet::parse("y>=-100")};
  double prev = 0.0;
  for (const auto& u : nested) {
    const double tau = unsafe_time_budget(m, u, kOne, 10.0, 0.0).tau;
    CHECK(tau >= prev);
    prev = tau;
  }
}

TEST_CASE("safe verdicts and their claims") {
  // Peak stays under 3 after widening by xi.
  auto m = time_model({1.4, 0.3, -0.05}, 0.33);
  m.provenance.budget = PacBudget{0.01, 1e-20, 3};
  const auto v = check_safety(m, UnsafeSet::at_least(3.0), kOne, PacBudget{0.01, 1e-20, 3}, 10.0);
  CHECK(v.kind == VerdictKind::SafeWithBudget);
  REQUIRE(v.unsafe_time_bound.has_value());
  CHECK(*v.unsafe_time_bound == doctest::Approx(0.1));
  CHECK(v.rigor == Rigor::Certified);
  const std::string text = v.text();
  CHECK(text.find("1e-20") != std::string::npos);
  CHECK(text.find("0.1") != std::string::npos);

  // Uns empty: safe for any model.
  const auto e = check_safety(time_model({0.0, 1e6}, 50.0), UnsafeSet{}, kOne,
                              PacBudget{0.2, 0.1, 3}, 10.0);
  CHECK(e.kind == VerdictKind::SafeWithBudget);
}

TEST_CASE("verdict kinds follow tube intersection") {
  const auto m = time_model({0.0, 1.0}, 0.0);
  const auto b = check_safety(m, UnsafeSet::at_least(9.0), kOne, PacBudget{0.01, 0.1, 2}, 10.0);
  CHECK(b.kind == VerdictKind::BudgetedWithTau);
  REQUIRE(b.tau.has_value());
  CHECK(*b.unsafe_time_bound <= 10.0 + *b.tau);
  const auto i = check_safety(m, UnsafeSet::at_least(-1.0), kOne, PacBudget{0.01, 0.1, 2}, 10.0);
  CHECK(i.kind == VerdictKind::Inconclusive);
  CHECK(*i.unsafe_time_bound <= 10.0 + *i.tau);

  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 40; ++k) {
    const auto mk = time_model({u(gen), u(gen), u(gen) / 5, u(gen) / 50}, std::abs(u(gen)) / 4);
    const auto uns = UnsafeSet::at_least(u(gen) * 5);
    const auto r = tube_range(mk, kOne, 10.0);
    const auto v = check_safety(mk, uns, kOne, PacBudget{0.05, 0.1, 5}, 10.0);
    CHECK((v.kind == VerdictKind::SafeWithBudget) == !uns.intersects(r.low, r.high));
  }
}

TEST_CASE("budget and scope must agree") {
  auto m = time_model({1.0}, 0.1);
  CHECK_THROWS_AS(check_safety(m, UnsafeSet{}, kOne, TwoLevelBudget{0.1, 0.1, 0.1, 0.1, 2}, 1.0),
                  ContractError);
  CHECK_THROWS_AS(check_safety(m, UnsafeSet{}, VerificationScope::all(InputSet::box({0}, {1})),
                               PacBudget{0.1, 0.1, 2}, 1.0),
                  ContractError);
  m.provenance.budget = PacBudget{0.1, 0.1, 2};
  CHECK_THROWS_AS(check_safety(m, UnsafeSet{}, kOne, PacBudget{0.2, 0.1, 2}, 1.0), ContractError);
  CHECK_NOTHROW(check_safety(m, UnsafeSet{}, kOne, PacBudget{0.1, 0.1, 2}, 1.0));
}

TEST_CASE("input-dependent enclosure is sound under random probes") {
  const auto tmpl = ModelTemplate::poly_input_time(2, 3, 2.0);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(tmpl.size());
  for (double& v : c) v = u(gen);
  const LearnedModel m{tmpl, c, 0.05, {}};
  const auto set = InputSet::box({0.5, -1.0}, {1.0, 0.0});
  const auto scope = VerificationScope::all(set);
  const auto r = tube_range(m, scope, 2.0);
  CHECK(r.rigor == Rigor::Certified);
  std::uniform_real_distribution<double> ua(0.5, 1.0), ub(-1.0, 0.0), ut(0.0, 2.0);
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k < 1'000'000; ++k) {
    const double x[2] = {ua(gen), ub(gen)};
    const double z = m.evaluate(x, ut(gen));
    lo = std::min(lo, z - m.xi);
    hi = std::max(hi, z + m.xi);
  }
  CHECK(r.low <= lo);
  CHECK(r.high >= hi);
  // Conservative, but not absurdly so.
  CHECK(r.high - r.low <= 1.1 * (hi - lo) + 0.01);

  RangeSettings shallow;
  shallow.max_depth = 6;
  shallow.gap_tol = 1e-9;
  RangeSettings deep = shallow;
  deep.max_depth = 12;
  const auto rs = tube_range(m, scope, 2.0, shallow);
  const auto rd = tube_range(m, scope, 2.0, deep);
  CHECK(rd.low >= rs.low);
  CHECK(rd.high <= rs.high);
}

TEST_CASE("ball scopes are enclosed by their bounding box") {
  const auto tmpl = ModelTemplate::poly_input_time(2, 1);
  const LearnedModel m{tmpl, {0.0, 1.0, 1.0, 0.0}, 0.0, {}};
  const auto r = tube_range(m, VerificationScope::all(InputSet::ball({0.0, 0.0}, 1.0)), 1.0);
  CHECK(r.low <= -2.0);
  CHECK(r.high >= 2.0);
  CHECK(r.high <= 2.0 + 1e-2);
}

TEST_CASE("custom templates fall back to a flagged grid") {
  const auto tmpl = ModelTemplate::custom(
      "sin", 0, {[](std::span<const double>, double t) { return std::sin(t); }});
  const LearnedModel m{tmpl, {2.0}, 0.1, {}};
  const auto r = tube_range(m, kOne, 10.0);
  CHECK(r.rigor == Rigor::GridApproximate);
  CHECK(r.low == doctest::Approx(-2.1).epsilon(1e-6));
  CHECK(r.high == doctest::Approx(2.1).epsilon(1e-6));
  const auto v = check_safety(m, UnsafeSet::at_least(1.0), kOne, PacBudget{0.01, 0.1, 2}, 10.0);
  CHECK(v.rigor == Rigor::GridApproximate);
  CHECK(v.text().find("not certified") != std::string::npos);
}

TEST_CASE("verdict report carries a machine-readable block") {
  const auto v = check_safety(time_model({1.0}, 0.1), UnsafeSet::at_least(3.0), kOne,
                              PacBudget{0.01, 1e-20, 2}, 10.0);
  std::ostringstream os;
  write_verdict(v, os, "abc123");
  const std::string s = os.str();
  CHECK(s.find("[verdict]") != std::string::npos);
  CHECK(s.find("kind=safe-with-budget") != std::string::npos);
  CHECK(s.find("config_hash=abc123") != std::string::npos);
}
