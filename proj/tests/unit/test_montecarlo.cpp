#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pacmc/montecarlo.hpp"

using namespace pacmc;

namespace {

// y = x0_1 + sin(t).
class SineOracle final : public TrajectoryOracle {
 public:
  std::size_t input_dimension() const override { return 1; }
  double horizon() const override { return 5.0; }
  double evaluate(std::span<const double> x0, double t) const override {
    return x0[0] + std::sin(t);
  }
};

// z = x0_1 + t - t^3/6, a truncated series for the oracle above.
LearnedModel series_model(double xi) {
  return LearnedModel{ModelTemplate::poly_input_time(1, 3), {0.0, 1.0, 1.0, 0, 0, 0, 0, 0, 0, -1.0 / 6.0}, xi, {}};
}

}  // namespace

TEST_CASE("validation grid") {
  const auto g = validation_grid(1e-3, 10.0);
  CHECK(g.size() == 10001);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 10.0);
  const auto h = validation_grid(0.3, 1.0);
  CHECK(h.size() == 4);
  CHECK(h.back() == doctest::Approx(0.9));
}

TEST_CASE("trajectory violation fractions") {
  SineOracle o;
  const std::vector<double> x0{0.2};
  const auto exact = ModelTemplate::custom(
      "sine", 1, {[](std::span<const double> x, double t) { return x[0] + std::sin(t); }});
  CHECK(validate_trajectory(o, LearnedModel{exact, {1.0}, 0.0, {}}, x0, 1e-3, 5.0) == 0.0);
  CHECK(validate_trajectory(o, series_model(100.0), x0, 1e-3, 5.0) == 0.0);
  const double f = validate_trajectory(o, series_model(0.1), x0, 1e-3, 5.0);
  CHECK(f > 0.0);
  CHECK(f < 1.0);
  // |sin t - (t - t^3/6)| <= 0.1 holds up to t = 1.6657.
  CHECK(f == doctest::Approx(3335.0 / 5001.0));
}

TEST_CASE("ensemble ratios") {
  SineOracle o;
  const auto set = InputSet::box({0.0}, {1.0});
  ValidationSettings s;
  s.count = 20;
  s.delta_t = 1e-2;
  s.seed = 3;

  s.threshold = 1.0;
  CHECK(validate_ensemble(o, series_model(0.0), set, s).ratio == 1.0);

  // Input does not affect the residual, so all fractions match.
  s.threshold = 0.5;
  const auto r = validate_ensemble(o, series_model(0.1), set, s);
  CHECK(r.ratio == 0.0);
  REQUIRE(r.per_trajectory.size() == 20);
  for (const auto& t : r.per_trajectory) {
    CHECK(set.contains(t.input));
    CHECK(t.violation_fraction >= 0.0);
    CHECK(t.violation_fraction <= 1.0);
  }

  // Monotone in threshold and xi.
  double prev = -1.0;
  for (double th : {0.0, 0.3, 0.5, 0.57, 0.6, 1.0}) {
    s.threshold = th;
    const double ratio = validate_ensemble(o, series_model(0.1), set, s).ratio;
    CHECK(ratio >= prev);
    prev = ratio;
  }
  s.threshold = 0.3;
  prev = -1.0;
  for (double xi : {0.0, 0.1, 0.5, 2.0, 10.0}) {
    const double ratio = validate_ensemble(o, series_model(xi), set, s).ratio;
    CHECK(ratio >= prev);
    prev = ratio;
  }
  CHECK(prev == 1.0);
}

TEST_CASE("ensembles are reproducible and use a fresh stream") {
  SineOracle o;
  const auto set = InputSet::box({0.0, 0.0}, {1.0, 1.0});
  CHECK(validation_inputs(set, 50, 9) == validation_inputs(set, 50, 9));
  CHECK(validation_inputs(set, 50, 9) != validation_inputs(set, 50, 10));
  const auto train = sample_inputs(set, 50, 9);
  const auto val = validation_inputs(set, 50, 9);
  for (const auto& v : val) {
    for (const auto& t : train) CHECK(v != t);
  }

  const auto set1 = InputSet::box({0.0}, {1.0});
  ValidationSettings s;
  s.count = 10;
  s.delta_t = 1e-2;
  s.seed = 21;
  const auto a = validate_ensemble(o, series_model(0.05), set1, s);
  const auto b = validate_ensemble(o, series_model(0.05), set1, s);
  std::ostringstream oa, ob;
  write_validation(a, oa);
  write_validation(b, ob);
  CHECK(oa.str() == ob.str());
  CHECK(oa.str().find("# ratio=") != std::string::npos);
}

TEST_CASE("plot data") {
  SineOracle o;
  std::ostringstream tube, traj;
  const std::vector<double> x0{0.0};
  write_tube_curve(series_model(0.5), x0, 5.0, tube, 11);
  write_trajectories(o, series_model(0.5), {{0.0}, {1.0}}, 5.0, traj, 11);
  std::string line;
  std::istringstream in(tube.str());
  int rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#' && line[0] != 't') ++rows;
  }
  CHECK(rows == 11);
  CHECK(traj.str().find("trajectory,t,y,z") != std::string::npos);
}
