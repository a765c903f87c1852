#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pacmc/error.hpp"
#include "pacmc/sampling.hpp"

using namespace pacmc;

namespace {

// y = x0_1 + t, for round-trip tests without integration.
class LinearOracle final : public TrajectoryOracle {
 public:
  std::size_t input_dimension() const override { return 2; }
  double horizon() const override { return 2.0; }
  double evaluate(std::span<const double> x0, double t) const override { return x0[0] + t; }
};

Dataset small_dataset() {
  LinearOracle o;
  return collect_dataset(o, sample_inputs(InputSet::box({0, 0}, {1, 1}), 3, 5),
                         sample_times(2.0, 4, 5));
}

}  // namespace

TEST_CASE("input sets parse and describe symmetrically") {
  for (const char* text : {"box(1.25:1.55, 2.28:2.32)", "point(1.4, 2.3)", "ball(-5, -5; r=1)"}) {
    const InputSet s = InputSet::parse(text);
    CHECK(InputSet::parse(s.describe()).describe() == s.describe());
  }
  const InputSet ball = InputSet::parse("ball(-5, -5; r=1)");
  CHECK(ball.lower() == std::vector<double>{-6, -6});
  CHECK(ball.upper() == std::vector<double>{-4, -4});
  CHECK(InputSet::parse("point(1.4, 2.3)").is_point());
  CHECK_THROWS_AS(InputSet::parse("box(2:1)"), ConfigError);
  CHECK_THROWS_AS(InputSet::parse("sphere(1)"), ConfigError);
  CHECK_THROWS_AS(InputSet::parse("ball(0, 0; r=-1)"), ConfigError);
}

TEST_CASE("draws stay inside their set") {
  RandomStream rng(3, "inputs");
  const InputSet ball = InputSet::ball({-5, -5}, 1.0);
  const InputSet box = InputSet::box({1.25, 2.28}, {1.55, 2.32});
  for (int i = 0; i < 2000; ++i) {
    CHECK(ball.contains(ball.sample(rng), 1e-12));
    CHECK(box.contains(box.sample(rng)));
  }
  CHECK(InputSet::ball({1, 2}, 0.0).sample(rng) == std::vector<double>{1, 2});
}

TEST_CASE("sampled times are uniform on [0, T]") {
  const auto t = sample_times(10.0, 5000, 11);
  std::vector<double> s(t);
  std::sort(s.begin(), s.end());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    d = std::max(d, std::abs(s[i] / 10.0 - static_cast<double>(i) / s.size()));
  }
  CHECK(d < 1.95 / std::sqrt(5000.0));
  CHECK(s.front() >= 0.0);
  CHECK(s.back() <= 10.0);
  CHECK_THROWS_AS(sample_times(10.0, 0, 1), ContractError);
}

TEST_CASE("time and input streams do not perturb each other") {
  const auto t_a = sample_times(1.0, 10, 9);
  const auto t_b = sample_times(1.0, 20, 9);
  CHECK(std::equal(t_a.begin(), t_a.end(), t_b.begin()));
  CHECK(sample_inputs(InputSet::box({0}, {1}), 5, 9) ==
        sample_inputs(InputSet::box({0}, {1}), 5, 9));
}

TEST_CASE("collect_dataset fills the grid and rejects times beyond the horizon") {
  const Dataset ds = small_dataset();
  CHECK(ds.input_count() == 3);
  CHECK(ds.time_count() == 4);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(ds.value(i, j) == ds.inputs[i][0] + ds.times[j]);
    }
  }
  LinearOracle o;
  CHECK_THROWS_AS(collect_dataset(o, {{0.0, 0.0}}, {2.5}), OutOfHorizon);
}

TEST_CASE("dataset CSV round-trips exactly") {
  Dataset ds = small_dataset();
  ds.seed = 77;
  ds.set_description = "box(0:1, 0:1)";
  std::stringstream buf;
  write_dataset(ds, buf);
  CHECK(read_dataset(buf) == ds);
}

TEST_CASE("identical consecutive inputs stay separate blocks") {
  LinearOracle o;
  Dataset ds = collect_dataset(o, {{0.5, 0.5}, {0.5, 0.5}}, {0.1, 0.2});
  std::stringstream buf;
  write_dataset(ds, buf);
  CHECK(read_dataset(buf).input_count() == 2);
}

TEST_CASE("malformed CSV is reported with its line") {
  auto parse = [](const std::string& text) {
    std::stringstream in(text);
    return read_dataset(in);
  };
  const std::string head = "# inputs=1 times=2\nx0_1,t,y\n";
  CHECK_THROWS_AS(parse(head + "0.5,0.1,1\n0.5,abc,2\n"), ParseError);
  CHECK_THROWS_AS(parse(head + "0.5,0.1\n"), ParseError);
  CHECK_THROWS_AS(parse(head + "0.5,0.1,1\n0.6,0.2,1\n"), ParseError);
  CHECK_THROWS_AS(parse(head + "0.5,0.1,1\n0.5,0.1,1\n0.5,0.2,1\n"), ParseError);
  CHECK_THROWS_AS(parse("# horizon=1\nx0_1,t,y\n0.5,1.5,1\n"), ParseError);
  try {
    parse(head + "0.5,0.1,1\n0.5,,2\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
}

TEST_CASE("format_double and parse_double are exact inverses") {
  RandomStream r(5, "fmt");
  for (int i = 0; i < 1000; ++i) {
    const double v = (r.uniform01() - 0.5) * std::pow(10.0, r.uniform(-30, 30));
    double back;
    REQUIRE(parse_double(format_double(v), back));
    CHECK(back == v);
  }
  double out;
  CHECK_FALSE(parse_double("1.0x", out));
  CHECK_FALSE(parse_double("", out));
}
