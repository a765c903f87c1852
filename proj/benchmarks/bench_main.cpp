#include <benchmark/benchmark.h>

#include <vector>

#include "pacmc/oracle.hpp"
#include "pacmc/rng.hpp"
#include "pacmc/scenario.hpp"
#include "pacmc/simplex.hpp"
#include "pacmc/verification.hpp"

using namespace pacmc;

namespace {

// Minimax fit of a polynomial in t to Van der Pol samples.
void BM_ScenarioLp(benchmark::State& state) {
  BenchmarkParams p;
  p.step = 1e-3;
  const auto oracle = make_benchmark("van_der_pol", p);
  const auto set = InputSet::point({1.4, 2.3});
  const auto ds = draw_dataset(*oracle, set, {static_cast<std::size_t>(state.range(0)), 1}, 1);
  const auto lp = build_lp(ds, ModelTemplate::poly_time(static_cast<int>(state.range(1)), 10.0),
                           100.0, 100.0);
  std::size_t iters = 0;
  for (auto _ : state) {
    const auto sol = solve_lp(lp);
    iters = sol.iterations;
    benchmark::DoNotOptimize(sol.xi);
  }
  state.counters["pivots"] = static_cast<double>(iters);
}
BENCHMARK(BM_ScenarioLp)->Args({500, 3})->Args({2000, 6})->Args({10811, 6})
    ->Unit(benchmark::kMillisecond);

void BM_Rk4VanDerPol(benchmark::State& state) {
  const auto sys = van_der_pol();
  const std::vector<double> x0{1.4, 2.3};
  const double step = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    const auto tr = integrate_ode(sys, x0, 10.0, step);
    benchmark::DoNotOptimize(tr.values.data());
  }
}
BENCHMARK(BM_Rk4VanDerPol)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_DdePredatorPrey(benchmark::State& state) {
  const auto sys = predator_prey();
  const std::vector<double> x0{-5.0, -5.0};
  for (auto _ : state) {
    const auto tr = integrate_dde(sys, x0, 10.0, 1e-4);
    benchmark::DoNotOptimize(tr.values.data());
  }
}
BENCHMARK(BM_DdePredatorPrey)->Unit(benchmark::kMillisecond);

void BM_TubeRangeUnivariate(benchmark::State& state) {
  RandomStream rng(3, "bench");
  std::vector<double> c(7);
  for (double& v : c) v = rng.uniform(-1.0, 1.0);
  const LearnedModel m{ModelTemplate::poly_time(6, 10.0), c, 0.3, {}};
  const auto scope = VerificationScope::one({});
  for (auto _ : state) benchmark::DoNotOptimize(tube_range(m, scope, 10.0).high);
}
BENCHMARK(BM_TubeRangeUnivariate);

// Branch-and-bound enclosure over an input box.
void BM_TubeRangeBox(benchmark::State& state) {
  const auto tmpl = ModelTemplate::poly_input_time(2, static_cast<int>(state.range(0)), 10.0);
  RandomStream rng(4, "bench");
  std::vector<double> c(tmpl.size());
  for (double& v : c) v = rng.uniform(-1.0, 1.0);
  const LearnedModel m{tmpl, c, 0.1, {}};
  const auto scope = VerificationScope::all(InputSet::ball({-5.0, -5.0}, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(tube_range(m, scope, 10.0).high);
}
BENCHMARK(BM_TubeRangeBox)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
