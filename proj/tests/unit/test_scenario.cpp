#include <doctest.h>

#include <cmath>
#include <string>

#include "pacmc/error.hpp"
#include "pacmc/scenario.hpp"

using namespace pacmc;

namespace {

Dataset grid(std::vector<std::vector<double>> inputs, std::vector<double> times,
             double (*f)(std::span<const double>, double)) {
  Dataset ds;
  ds.inputs = std::move(inputs);
  ds.times = std::move(times);
  ds.horizon = 10.0;
  for (const auto& x : ds.inputs) {
    for (double t : ds.times) ds.values.push_back(f(x, t));
  }
  return ds;
}

// Known oracle: y = x0_1 - 0.5 t^2.
class QuadOracle final : public TrajectoryOracle {
 public:
  std::size_t input_dimension() const override { return 1; }
  double horizon() const override { return 2.0; }
  double evaluate(std::span<const double> x0, double t) const override {
    return x0[0] - 0.5 * t * t;
  }
};

}  // namespace

TEST_CASE("LP shape and row order") {
  const Dataset ds = grid({{0.0}}, {0.0, 1.0, 2.0}, [](std::span<const double>, double t) { return t; });
  const auto lp = build_lp(ds, ModelTemplate::poly_time(0), 100, 100);
  CHECK(lp.rows == 6);
  CHECK(lp.cols == 2);
  // i-major, j-minor, '+' before '-'.
  CHECK(lp.b == std::vector<double>{0.0, -0.0, 1.0, -1.0, 2.0, -2.0});
  CHECK(lp.at(0, 0) == 1.0);
  CHECK(lp.at(1, 0) == -1.0);
  CHECK(lp.at(0, 1) == -1.0);
  CHECK(lp.upper[0] == 100.0);
}

TEST_CASE("coefficient bounds scale with the time power") {
  const Dataset ds = grid({{0.0}}, {1.0}, [](std::span<const double>, double) { return 0.0; });
  const auto lp = build_lp(ds, ModelTemplate::poly_time(2, 10.0), 100, 100);
  CHECK(lp.upper[0] == 100.0);
  CHECK(lp.upper[1] == 1000.0);
  CHECK(lp.upper[2] == 10000.0);
}

TEST_CASE("representable data is fitted exactly") {
  const Dataset ds = grid({{1.0}, {2.0}}, {0.0, 0.5, 1.0, 1.5},
                          [](std::span<const double> x, double t) { return 2 * x[0] + t - t * t; });
  const auto m = fit(ds, ModelTemplate::poly_input_time(1, 2), 100, 100);
  CHECK(m.xi == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(m.xi >= 0.0);
}

TEST_CASE("non-finite basis values name the data point") {
  const auto tmpl = ModelTemplate::custom(
      "log", 0, {[](std::span<const double>, double t) { return std::log(t); }});
  const Dataset ds = grid({{0.0}}, {1.0, 0.0}, [](std::span<const double>, double) { return 0.0; });
  try {
    build_lp(ds, tmpl, 100, 100);
    FAIL("expected ModelDomainError");
  } catch (const ModelDomainError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("i=1") != std::string::npos);
    CHECK(msg.find("j=2") != std::string::npos);
  }
}

TEST_CASE("learn refuses undersized datasets and names both sizes") {
  const Dataset ds = grid({{0.0}}, {0.0, 1.0, 2.0}, [](std::span<const double>, double t) { return t; });
  try {
    learn(ds, ModelTemplate::poly_time(1), 100, 100, PacBudget{0.1, 1e-3, 3});
    FAIL("expected InsufficientSamples");
  } catch (const InsufficientSamples& e) {
    const std::string msg = e.what();
    CHECK(msg.find(std::to_string(min_samples(0.1, 1e-3, 3))) != std::string::npos);
    CHECK(msg.find("provides 3") != std::string::npos);
  }
  CHECK_THROWS_AS(learn(ds, ModelTemplate::poly_time(1), 100, 100, PacBudget{0.1, 1e-3, 4}),
                  ContractError);
}

TEST_CASE("learn records provenance") {
  QuadOracle o;
  const auto set = InputSet::box({0.0}, {1.0});
  const TwoLevelBudget b{0.5, 0.1, 0.5, 0.1, 4};
  const Dataset ds = draw_dataset(o, set, required_samples(b), 4);
  const auto m = learn(ds, ModelTemplate::poly_time(2, 2.0), 100, 100, b);
  CHECK(m.provenance.time_samples == ds.time_count());
  CHECK(m.provenance.input_samples == ds.input_count());
  CHECK(m.provenance.seed == 4);
  CHECK(m.provenance.budget.has_value());
  // Input spread of 1 cannot be captured by a time-only model.
  CHECK(m.xi > 0.4);
  CHECK(m.xi <= 0.5 + 1e-9);
}

TEST_CASE("staged learning refits only xi on fresh data") {
  QuadOracle o;
  const auto set = InputSet::box({0.0}, {1.0});
  const TwoLevelBudget full{0.5, 0.1, 0.5, 0.1, 1};
  const auto tmpl = ModelTemplate::poly_input_time(1, 2, 2.0);
  const auto m = staged_learn(o, set, tmpl, {10, 10}, full, 100, 100, 8);
  CHECK(m.provenance.staged);
  CHECK(m.provenance.pilot_time_samples == 10);
  CHECK(m.model_template.kind() == ModelTemplate::Kind::Frozen);
  CHECK(m.coefficients == std::vector<double>{1.0});
  // The oracle is representable, so the frozen pilot fit is exact.
  CHECK(m.xi == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("phase-2 xi equals the directly computed max residual") {
  QuadOracle o;
  const auto set = InputSet::box({0.0}, {1.0});
  const auto tmpl = ModelTemplate::poly_time(1, 2.0);
  const TwoLevelBudget full{0.5, 0.1, 0.5, 0.1, 1};
  const Dataset pilot = draw_dataset(o, set, {8, 8}, 3, kPilotPrefix);
  const Dataset fresh = draw_dataset(o, set, required_samples(full), 3);
  CHECK(pilot.times != fresh.times);
  const auto m = staged_learn_from_data(pilot, fresh, tmpl, full, 100, 100);
  const auto c = m.model_template.frozen_coefficients();
  double worst = 0.0;
  for (std::size_t i = 0; i < fresh.input_count(); ++i) {
    for (std::size_t j = 0; j < fresh.time_count(); ++j) {
      worst = std::max(worst, std::abs(tmpl.evaluate(c, fresh.inputs[i], fresh.times[j]) -
                                       fresh.value(i, j)));
    }
  }
  CHECK(std::abs(m.xi - worst) <= 1e-12);
  CHECK_THROWS_AS(staged_learn_from_data(pilot, fresh, tmpl, TwoLevelBudget{0.5, 0.1, 0.5, 0.1, 3},
                                         100, 100),
                  ContractError);
}

TEST_CASE("too-small U_xi is a BoundInfeasible error") {
  const Dataset ds = grid({{0.0}}, {0.0, 1.0}, [](std::span<const double>, double t) { return 10 * t; });
  CHECK_THROWS_AS(fit(ds, ModelTemplate::poly_time(0), 100, 1.0), BoundInfeasible);
}
