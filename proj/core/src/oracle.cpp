#include "pacmc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <sstream>

#include "pacmc/error.hpp"

namespace pacmc {
namespace {

// Number of steps of length `step` needed to cover [0, horizon]. A ratio
// within rounding noise of an integer is treated as that integer so that
// e.g. 10 / 1e-4 does not produce a spurious sliver step at the end.
std::size_t step_count(double horizon, double step) {
  const double ratio = horizon / step;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) {
    return static_cast<std::size_t>(std::max(1.0, nearest));
  }
  return static_cast<std::size_t>(std::ceil(ratio));
}

void check_integration_args(const BenchmarkSystem& system, std::span<const double> x0,
                            double horizon, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw ContractError("integration step must be positive and finite");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ContractError("integration horizon must be positive and finite");
  }
  if (x0.size() != system.state_dimension) {
    throw ContractError("initial state has dimension " + std::to_string(x0.size()) +
                        ", system '" + system.name + "' expects " +
                        std::to_string(system.state_dimension));
  }
  if (!system.rhs) throw ContractError("system '" + system.name + "' has no right-hand side");
}

void check_finite(std::span<const double> x, double t, const std::string& name) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "integration of '" << name << "' diverged at t=" << t;
      throw IntegrationDiverged(t, os.str());
    }
  }
}

DenseTrajectory start_trajectory(const BenchmarkSystem& system, std::size_t steps,
                                 std::span<const double> x0) {
  DenseTrajectory traj;
  traj.dimension = system.state_dimension;
  traj.observed_index = system.observed_index;
  traj.nodes.reserve(steps + 1);
  traj.values.reserve((steps + 1) * traj.dimension);
  traj.nodes.push_back(0.0);
  traj.values.insert(traj.values.end(), x0.begin(), x0.end());
  return traj;
}

}  // namespace

DenseTrajectory DenseTrajectory::observed_only() const {
  DenseTrajectory out;
  out.nodes = nodes;
  out.dimension = 1;
  out.observed_index = 0;
  out.values.resize(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) out.values[k] = observed(k);
  return out;
}

double query_state(const DenseTrajectory& traj, double t) {
  if (traj.nodes.empty()) throw ContractError("query on an empty trajectory");
  if (!(t >= 0.0 && t <= traj.nodes.back())) {
    std::ostringstream os;
    os.precision(17);
    os << "time " << t << " outside horizon [0, " << traj.nodes.back() << "]";
    throw OutOfHorizon(os.str());
  }
  // First node strictly greater than t; the bracketing segment starts before it.
  auto it = std::upper_bound(traj.nodes.begin(), traj.nodes.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - traj.nodes.begin());
  const std::size_t lo = hi - 1;
  if (t == traj.nodes[lo] || hi == traj.nodes.size()) return traj.observed(lo);
  const double t0 = traj.nodes[lo];
  const double t1 = traj.nodes[hi];
  const double y0 = traj.observed(lo);
  const double y1 = traj.observed(hi);
  return y0 + (y1 - y0) * ((t - t0) / (t1 - t0));
}

DenseTrajectory integrate_ode(const BenchmarkSystem& system, std::span<const double> x0,
                              double horizon, double step) {
  check_integration_args(system, x0, horizon, step);
  if (system.delay != 0.0) {
    throw ContractError("integrate_ode called on delayed system '" + system.name + "'");
  }
  const std::size_t n = system.state_dimension;
  const std::size_t steps = step_count(horizon, step);
  DenseTrajectory traj = start_trajectory(system, steps, x0);
  check_finite(x0, 0.0, system.name);

  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  const std::span<const double> no_delay;

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * step;
    const double t_next = (k + 1 == steps) ? horizon : static_cast<double>(k + 1) * step;
    const double h = t_next - t;

    system.rhs(t, x, no_delay, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    system.rhs(t + 0.5 * h, tmp, no_delay, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    system.rhs(t + 0.5 * h, tmp, no_delay, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    system.rhs(t_next, tmp, no_delay, k4);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    check_finite(x, t_next, system.name);
    traj.nodes.push_back(t_next);
    traj.values.insert(traj.values.end(), x.begin(), x.end());
  }
  return traj;
}

DenseTrajectory integrate_dde(const BenchmarkSystem& system,
                              std::span<const double> constant_history, double horizon,
                              double step) {
  check_integration_args(system, constant_history, horizon, step);
  if (!(system.delay > 0.0)) {
    throw ContractError("integrate_dde called on undelayed system '" + system.name + "'");
  }
  const std::size_t n = system.state_dimension;
  const std::size_t per_delay = step_count(system.delay, std::min(step, system.delay));
  const double h_full = system.delay / static_cast<double>(per_delay);
  const std::size_t steps = step_count(horizon, h_full);
  DenseTrajectory traj = start_trajectory(system, steps, constant_history);
  check_finite(constant_history, 0.0, system.name);

  std::vector<double> x(constant_history.begin(), constant_history.end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  std::vector<double> d0(n), dmid(n), d1(n);

  // State at time (node k + frac * h_full) - delay, i.e. between nodes
  // k - per_delay and k - per_delay + 1.
  auto delayed = [&](std::size_t k, double frac, std::vector<double>& out) {
    if (k < per_delay) {
      std::copy(constant_history.begin(), constant_history.end(), out.begin());
      return;
    }
    const std::size_t j = k - per_delay;
    const auto a = traj.state(j);
    if (frac == 0.0) {
      std::copy(a.begin(), a.end(), out.begin());
      return;
    }
    const auto b = traj.state(j + 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + (b[i] - a[i]) * frac;
  };

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h_full;
    const double t_next = (k + 1 == steps) ? horizon : static_cast<double>(k + 1) * h_full;
    const double h = t_next - t;
    const double frac = h / h_full;

    delayed(k, 0.0, d0);
    delayed(k, 0.5 * frac, dmid);
    delayed(k, frac, d1);

    system.rhs(t, x, d0, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    system.rhs(t + 0.5 * h, tmp, dmid, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    system.rhs(t + 0.5 * h, tmp, dmid, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    system.rhs(t_next, tmp, d1, k4);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    check_finite(x, t_next, system.name);
    traj.nodes.push_back(t_next);
    traj.values.insert(traj.values.end(), x.begin(), x.end());
  }
  return traj;
}

DenseTrajectory integrate(const BenchmarkSystem& system, std::span<const double> x0,
                          double horizon, double step) {
  return system.delay > 0.0 ? integrate_dde(system, x0, horizon, step)
                            : integrate_ode(system, x0, horizon, step);
}

BenchmarkSystem van_der_pol() {
  BenchmarkSystem s;
  s.name = "van_der_pol";
  s.state_dimension = 2;
  s.default_horizon = 10.0;
  s.rhs = [](double, std::span<const double> x, std::span<const double>, std::span<double> dx) {
    dx[0] = x[1];
    dx[1] = (1.0 - x[0] * x[0]) * x[1] - x[0];
  };
  return s;
}

BenchmarkSystem bio9() {
  BenchmarkSystem s;
  s.name = "bio9";
  s.state_dimension = 9;
  s.default_horizon = 10.0;
  s.rhs = [](double, std::span<const double> x, std::span<const double>, std::span<double> dx) {
    const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4];
    const double x6 = x[5], x7 = x[6], x8 = x[7], x9 = x[8];
    dx[0] = 3.0 * x3 - x1 * x6;
    dx[1] = x4 - x2 * x6;
    dx[2] = x1 * x6 - 3.0 * x3;
    dx[3] = x2 * x6 - x4;
    dx[4] = 3.0 * x3 + 5.0 * x1 - x5;
    dx[5] = 5.0 * x5 + 3.0 * x3 + x4 - x6 * (x1 + x2 + 2.0 * x8 + 1.0);
    dx[6] = 5.0 * x4 + x2 - 0.5 * x7;
    dx[7] = 5.0 * x7 - 2.0 * x6 * x8 + x9 - 0.2 * x8;
    dx[8] = 2.0 * x6 * x8 - x9;
  };
  return s;
}

BenchmarkSystem scalable(int l) {
  if (l < 1) throw ConfigError("scalable system needs l >= 1, got " + std::to_string(l));
  BenchmarkSystem s;
  s.name = "scalable";
  s.state_dimension = static_cast<std::size_t>(2 * l + 1);
  s.default_horizon = 2.0;
  s.parameters["l"] = l;
  const std::size_t pairs = static_cast<std::size_t>(l);
  s.rhs = [pairs](double, std::span<const double> x, std::span<const double>,
                  std::span<double> dx) {
    // 1-based x_{i+1} + x_{i+2} for i = 1..l  ->  0-based x[i] + x[i+1].
    double sum = 0.0;
    for (std::size_t i = 1; i <= pairs; ++i) sum += x[i] + x[i + 1];
    dx[0] = 1.0 + sum / static_cast<double>(pairs);
    for (std::size_t i = 1; i <= pairs; ++i) {
      const std::size_t pos = 2 * i - 1;  // x_{2i}
      dx[pos] = x[pos + 1];
      dx[pos + 1] = -10.0 * std::sin(x[pos]) - x[1];
    }
  };
  return s;
}

BenchmarkSystem predator_prey() {
  BenchmarkSystem s;
  s.name = "predator_prey";
  s.state_dimension = 2;
  s.delay = 0.1;
  s.default_horizon = 10.0;
  const double a = 0.25, m = 200.0, b = -0.01, c = -1.0, d = 0.01;
  s.parameters = {{"a", a}, {"m", m}, {"b", b}, {"c", c}, {"d", d}, {"tau", s.delay}};
  s.rhs = [=](double, std::span<const double> x, std::span<const double> xd,
              std::span<double> dx) {
    dx[0] = a * x[0] * (1.0 - x[0] / m) + b * x[0] * x[1];
    dx[1] = c * x[1] + d * xd[0] * xd[1];
  };
  return s;
}

BenchmarkSystem custom_system(std::string name, std::size_t dimension, double delay,
                              RightHandSide rhs, std::size_t observed_index,
                              double default_horizon) {
  if (dimension == 0) throw ContractError("custom system needs dimension >= 1");
  if (observed_index >= dimension) throw ContractError("observed index out of range");
  if (delay < 0.0) throw ContractError("delay must be nonnegative");
  BenchmarkSystem s;
  s.name = std::move(name);
  s.state_dimension = dimension;
  s.delay = delay;
  s.observed_index = observed_index;
  s.default_horizon = default_horizon;
  s.rhs = std::move(rhs);
  return s;
}

std::vector<double> TrajectoryOracle::evaluate_many(std::span<const double> x0,
                                                    std::span<const double> times) const {
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(evaluate(x0, t));
  return out;
}

SimulatedOracle::SimulatedOracle(BenchmarkSystem system, double horizon, double step)
    : system_(std::move(system)), horizon_(horizon), step_(step) {
  if (!(horizon_ > 0.0)) throw ConfigError("oracle horizon must be positive");
  if (!(step_ > 0.0)) throw ConfigError("oracle integration step must be positive");
}

void SimulatedOracle::check_input(std::span<const double> x0) const {
  if (x0.size() != system_.state_dimension) {
    throw ContractError("input has dimension " + std::to_string(x0.size()) + ", oracle '" +
                        system_.name + "' expects " +
                        std::to_string(system_.state_dimension));
  }
}

DenseTrajectory SimulatedOracle::simulate(std::span<const double> x0) const {
  check_input(x0);
  return integrate(system_, x0, horizon_, step_);
}

std::shared_ptr<const DenseTrajectory> SimulatedOracle::trajectory(
    std::span<const double> x0) const {
  check_input(x0);
  std::string key(reinterpret_cast<const char*>(x0.data()), x0.size_bytes());
  {
    std::shared_lock lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto traj = std::make_shared<const DenseTrajectory>(simulate(x0).observed_only());
  std::unique_lock lock(mu_);
  auto [it, inserted] = cache_.emplace(std::move(key), std::move(traj));
  return it->second;
}

std::size_t SimulatedOracle::cache_size() const {
  std::shared_lock lock(mu_);
  return cache_.size();
}

double SimulatedOracle::evaluate(std::span<const double> x0, double t) const {
  return query_state(*trajectory(x0), t);
}

std::vector<double> SimulatedOracle::evaluate_many(std::span<const double> x0,
                                                   std::span<const double> times) const {
  check_input(x0);
  std::shared_ptr<const DenseTrajectory> cached;
  {
    std::string key(reinterpret_cast<const char*>(x0.data()), x0.size_bytes());
    std::shared_lock lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) cached = it->second;
  }
  // Batch queries integrate once without growing the cache.
  DenseTrajectory local;
  const DenseTrajectory* traj = cached.get();
  if (traj == nullptr) {
    local = simulate(x0);
    traj = &local;
  }
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(query_state(*traj, t));
  return out;
}

std::string SimulatedOracle::describe() const {
  std::ostringstream os;
  os << system_.name << "(T=" << horizon_ << ", step=" << step_;
  for (const auto& [k, v] : system_.parameters) os << ", " << k << "=" << v;
  os << ")";
  return os.str();
}

BenchmarkSystem benchmark_system(std::string_view name, const BenchmarkParams& params) {
  if (name == "van_der_pol") return van_der_pol();
  if (name == "bio9") return bio9();
  if (name == "scalable") return scalable(params.l);
  if (name == "predator_prey") return predator_prey();
  throw ConfigError("unknown benchmark system '" + std::string(name) + "'");
}

std::shared_ptr<SimulatedOracle> make_benchmark(std::string_view name,
                                                const BenchmarkParams& params) {
  BenchmarkSystem system = benchmark_system(name, params);
  const double horizon = params.horizon > 0.0 ? params.horizon : system.default_horizon;
  return std::make_shared<SimulatedOracle>(std::move(system), horizon, params.step);
}

}  // namespace pacmc
