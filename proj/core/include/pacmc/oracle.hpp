#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pacmc {

// Time-stamped states produced by a fixed-step integration. Node times are
// t_0 = 0 < t_1 < ... < t_K = T, evenly spaced except possibly the last gap.
struct DenseTrajectory {
  std::vector<double> nodes;
  std::vector<double> values;  // row-major, nodes.size() x dimension
  std::size_t dimension = 0;
  std::size_t observed_index = 0;

  double horizon() const { return nodes.empty() ? 0.0 : nodes.back(); }
  std::size_t size() const { return nodes.size(); }
  std::span<const double> state(std::size_t k) const {
    return {values.data() + k * dimension, dimension};
  }
  double observed(std::size_t k) const { return values[k * dimension + observed_index]; }

  // Same nodes, only the observed coordinate kept.
  DenseTrajectory observed_only() const;
};

// Linear interpolation of the observed coordinate. Exact at node times.
// Throws OutOfHorizon when t is outside [0, T].
double query_state(const DenseTrajectory& traj, double t);

// dxdt = f(t, x, x(t - delay)). For ODEs the delayed span is empty.
using RightHandSide = std::function<void(double t, std::span<const double> x,
                                         std::span<const double> delayed,
                                         std::span<double> dxdt)>;

struct BenchmarkSystem {
  std::string name;
  std::size_t state_dimension = 0;
  double delay = 0.0;
  std::size_t observed_index = 0;
  double default_horizon = 10.0;
  std::map<std::string, double> parameters;
  RightHandSide rhs;
};

BenchmarkSystem van_der_pol();
BenchmarkSystem bio9();
BenchmarkSystem scalable(int l);
BenchmarkSystem predator_prey();
// User-supplied dynamics; delay > 0 selects the method-of-steps integrator.
BenchmarkSystem custom_system(std::string name, std::size_t dimension, double delay,
                              RightHandSide rhs, std::size_t observed_index = 0,
                              double default_horizon = 1.0);

// Classical RK4 with fixed step; the last step is shortened to land on T.
DenseTrajectory integrate_ode(const BenchmarkSystem& system, std::span<const double> x0,
                              double horizon, double step);

// Method of steps with RK4 inside each delay interval. The step is reduced to
// delay / ceil(delay / step) so that delayed stage times fall on nodes or
// node midpoints; delayed values come from the linearly interpolated
// solution, or from the constant history before t = 0.
DenseTrajectory integrate_dde(const BenchmarkSystem& system,
                              std::span<const double> constant_history, double horizon,
                              double step);

// Dispatches on system.delay.
DenseTrajectory integrate(const BenchmarkSystem& system, std::span<const double> x0,
                          double horizon, double step);

// Black-box map (x0, t) -> y. Implementations must be deterministic and safe
// to call concurrently.
class TrajectoryOracle {
 public:
  virtual ~TrajectoryOracle() = default;

  virtual std::size_t input_dimension() const = 0;
  virtual double horizon() const = 0;
  virtual double evaluate(std::span<const double> x0, double t) const = 0;

  // y(x0, t) for every t in times. The default calls evaluate() per time;
  // simulated oracles integrate once.
  virtual std::vector<double> evaluate_many(std::span<const double> x0,
                                            std::span<const double> times) const;

  virtual std::string describe() const { return "custom"; }
};

// Oracle backed by numerical integration of a BenchmarkSystem. evaluate()
// integrates once per distinct input (keyed by the exact bits of x0) and
// caches the observed coordinate.
class SimulatedOracle final : public TrajectoryOracle {
 public:
  SimulatedOracle(BenchmarkSystem system, double horizon, double step);

  std::size_t input_dimension() const override { return system_.state_dimension; }
  double horizon() const override { return horizon_; }
  double evaluate(std::span<const double> x0, double t) const override;
  std::vector<double> evaluate_many(std::span<const double> x0,
                                    std::span<const double> times) const override;
  std::string describe() const override;

  const BenchmarkSystem& system() const { return system_; }
  double step() const { return step_; }

  // Cached observed-only trajectory for x0.
  std::shared_ptr<const DenseTrajectory> trajectory(std::span<const double> x0) const;
  // Fresh integration, bypassing the cache.
  DenseTrajectory simulate(std::span<const double> x0) const;
  std::size_t cache_size() const;

 private:
  void check_input(std::span<const double> x0) const;

  BenchmarkSystem system_;
  double horizon_;
  double step_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<std::string, std::shared_ptr<const DenseTrajectory>> cache_;
};

struct BenchmarkParams {
  double horizon = 0.0;  // 0 selects the system's default horizon
  double step = 1e-4;
  int l = 50;            // scalable system size
};

// Known names: van_der_pol, bio9, scalable, predator_prey.
// Throws ConfigError for anything else.
BenchmarkSystem benchmark_system(std::string_view name, const BenchmarkParams& params = {});
std::shared_ptr<SimulatedOracle> make_benchmark(std::string_view name,
                                                const BenchmarkParams& params = {});

}  // namespace pacmc
