#include <doctest.h>

#include <cmath>
#include <vector>

#include "pacmc/error.hpp"
#include "pacmc/oracle.hpp"

using namespace pacmc;

namespace {

BenchmarkSystem harmonic() {
  return custom_system("harmonic", 2, 0.0,
                       [](double, std::span<const double> x, std::span<const double>,
                          std::span<double> dx) {
                         dx[0] = x[1];
                         dx[1] = -x[0];
                       });
}

double harmonic_error(double step) {
  const std::vector<double> x0{1.0, 0.0};
  const auto traj = integrate_ode(harmonic(), x0, 5.0, step);
  return std::abs(traj.state(traj.size() - 1)[0] - std::cos(5.0));
}

}  // namespace

TEST_CASE("RK4 converges at fourth order") {
  const double e1 = harmonic_error(0.1);
  const double e2 = harmonic_error(0.05);
  const double e3 = harmonic_error(0.025);
  CHECK(std::log2(e1 / e2) >= 3.9);
  CHECK(std::log2(e2 / e3) >= 3.9);
}

TEST_CASE("final node lands exactly on the horizon") {
  const std::vector<double> x0{1.0, 0.0};
  const auto traj = integrate_ode(harmonic(), x0, 1.05, 0.1);
  CHECK(traj.nodes.back() == 1.05);
  CHECK(traj.nodes.front() == 0.0);
}

TEST_CASE("method of steps reproduces x'(t) = x(t-1) with unit history") {
  const auto sys = custom_system("lag", 1, 1.0,
                                 [](double, std::span<const double>, std::span<const double> d,
                                    std::span<double> dx) { dx[0] = d[0]; });
  const std::vector<double> hist{1.0};
  const auto traj = integrate_dde(sys, hist, 2.0, 0.01);
  CHECK(query_state(traj, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(query_state(traj, 1.0) - 2.0) < 1e-6);
  CHECK(std::abs(query_state(traj, 2.0) - 3.5) < 1e-6);
}

TEST_CASE("query_state is exact at nodes and rejects times outside [0, T]") {
  const std::vector<double> x0{1.0, 0.0};
  const auto traj = integrate_ode(harmonic(), x0, 1.0, 0.1);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    CHECK(query_state(traj, traj.nodes[k]) == traj.observed(k));
  }
  CHECK_THROWS_AS(query_state(traj, -1e-9), OutOfHorizon);
  CHECK_THROWS_AS(query_state(traj, 1.0 + 1e-9), OutOfHorizon);
}

TEST_CASE("divergence is reported with its time") {
  const auto sys = custom_system("blowup", 1, 0.0,
                                 [](double, std::span<const double> x, std::span<const double>,
                                    std::span<double> dx) { dx[0] = x[0] * x[0]; });
  const std::vector<double> x0{1.0};
  try {
    integrate_ode(sys, x0, 2.0, 0.01);
    FAIL("expected divergence");
  } catch (const IntegrationDiverged& e) {
    CHECK(e.time() > 0.9);
    CHECK(e.time() <= 1.1);
  }
}

TEST_CASE("benchmark registry") {
  CHECK(benchmark_system("van_der_pol").state_dimension == 2);
  CHECK(benchmark_system("bio9").state_dimension == 9);
  BenchmarkParams p;
  p.l = 50;
  CHECK(benchmark_system("scalable", p).state_dimension == 101);
  CHECK(benchmark_system("predator_prey").delay == 0.1);
  CHECK_THROWS_AS(benchmark_system("lorenz"), ConfigError);
  CHECK_THROWS_AS(scalable(0), ConfigError);
}

TEST_CASE("simulated oracle is deterministic and evaluate_many agrees with evaluate") {
  BenchmarkParams p;
  p.step = 1e-3;
  auto oracle = make_benchmark("van_der_pol", p);
  const std::vector<double> x0{1.4, 2.3};
  const std::vector<double> times{0.0, 0.5, 3.3, 10.0};
  const auto many = oracle->evaluate_many(x0, times);
  for (std::size_t j = 0; j < times.size(); ++j) {
    CHECK(oracle->evaluate(x0, times[j]) == many[j]);
  }
  CHECK(oracle->evaluate(x0, 0.0) == 1.4);
  CHECK(oracle->cache_size() == 1);
  CHECK_THROWS_AS(oracle->evaluate(x0, 10.5), OutOfHorizon);
  const std::vector<double> bad{1.0};
  CHECK_THROWS_AS(oracle->evaluate(bad, 1.0), ContractError);
}

TEST_CASE("van der Pol trajectory stays on its limit cycle scale") {
  BenchmarkParams p;
  p.step = 1e-3;
  auto oracle = make_benchmark("van_der_pol", p);
  const std::vector<double> x0{1.4, 2.3};
  double peak = 0.0;
  for (int k = 0; k <= 1000; ++k) peak = std::max(peak, std::abs(oracle->evaluate(x0, k * 0.01)));
  CHECK(peak > 1.5);
  CHECK(peak < 3.0);
}
