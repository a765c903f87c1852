#include "pacmc/montecarlo.hpp"

#include <cmath>
#include <ostream>

#include "pacmc/error.hpp"
#include "pacmc/parallel.hpp"

namespace pacmc {
namespace {

std::vector<double> even_times(double horizon, std::size_t points) {
  points = std::max<std::size_t>(points, 2);
  std::vector<double> t(points);
  for (std::size_t k = 0; k < points; ++k) {
    t[k] = horizon * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  t.back() = horizon;
  return t;
}

}  // namespace

std::vector<double> validation_grid(double delta_t, double horizon) {
  if (!(delta_t > 0.0)) throw ContractError("delta_t must be positive");
  if (!(horizon >= 0.0)) throw ContractError("horizon must be non-negative");
  const auto last = static_cast<std::size_t>(std::floor(horizon / delta_t + 1e-9));
  std::vector<double> t(last + 1);
  for (std::size_t j = 0; j <= last; ++j) {
    t[j] = std::min(static_cast<double>(j) * delta_t, horizon);
  }
  return t;
}

double validate_trajectory(const TrajectoryOracle& oracle, const LearnedModel& model,
                           std::span<const double> x0, double delta_t, double horizon) {
  const auto grid = validation_grid(delta_t, horizon);
  const auto y = oracle.evaluate_many(x0, grid);
  std::size_t bad = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (std::abs(y[j] - model.evaluate(x0, grid[j])) > model.xi) ++bad;
  }
  return static_cast<double>(bad) / static_cast<double>(grid.size());
}

std::vector<std::vector<double>> validation_inputs(const InputSet& set, std::size_t count,
                                                   std::uint64_t seed) {
  RandomStream rng(seed, "validation");
  std::vector<std::vector<double>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(set.sample(rng));
  return out;
}

ValidationReport validate_ensemble(const TrajectoryOracle& oracle, const LearnedModel& model,
                                   const InputSet& set, const ValidationSettings& settings) {
  if (settings.count < 1) throw ContractError("validation count must be >= 1");
  if (!(settings.threshold >= 0.0 && settings.threshold <= 1.0)) {
    throw ContractError("validation threshold must lie in [0, 1]");
  }
  ValidationReport report;
  report.settings = settings;
  report.horizon = oracle.horizon();
  const auto inputs = validation_inputs(set, settings.count, settings.seed);
  report.per_trajectory.resize(inputs.size());
  parallel_for(inputs.size(), [&](std::size_t i) {
    report.per_trajectory[i] = {
        inputs[i],
        validate_trajectory(oracle, model, inputs[i], settings.delta_t, report.horizon)};
  });
  std::size_t good = 0;
  for (const auto& r : report.per_trajectory) {
    if (r.violation_fraction <= settings.threshold) ++good;
  }
  report.ratio = static_cast<double>(good) / static_cast<double>(inputs.size());
  return report;
}

void write_validation(const ValidationReport& report, std::ostream& out,
                      std::string_view config_hash) {
  out << "# pacmc validation\n";
  if (!config_hash.empty()) out << "# config_hash=" << config_hash << "\n";
  const std::size_t n =
      report.per_trajectory.empty() ? 0 : report.per_trajectory.front().input.size();
  out << "index";
  for (std::size_t d = 0; d < n; ++d) out << ",x0_" << d + 1;
  out << ",violation_fraction,within_threshold\n";
  for (std::size_t i = 0; i < report.per_trajectory.size(); ++i) {
    const auto& r = report.per_trajectory[i];
    out << i;
    for (double v : r.input) out << ',' << format_double(v);
    out << ',' << format_double(r.violation_fraction) << ','
        << (r.violation_fraction <= report.settings.threshold ? 1 : 0) << "\n";
  }
  out << "# count=" << report.settings.count << "\n";
  out << "# delta_t=" << format_double(report.settings.delta_t) << "\n";
  out << "# threshold=" << format_double(report.settings.threshold) << "\n";
  out << "# seed=" << report.settings.seed << "\n";
  out << "# horizon=" << format_double(report.horizon) << "\n";
  out << "# ratio=" << format_double(report.ratio) << "\n";
}

void write_tube_curve(const LearnedModel& model, std::span<const double> x0, double horizon,
                      std::ostream& out, std::size_t points, std::string_view config_hash) {
  if (!config_hash.empty()) out << "# config_hash=" << config_hash << "\n";
  out << "t,z,z_minus_xi,z_plus_xi\n";
  for (double t : even_times(horizon, points)) {
    const double z = model.evaluate(x0, t);
    out << format_double(t) << ',' << format_double(z) << ',' << format_double(z - model.xi)
        << ',' << format_double(z + model.xi) << "\n";
  }
}

void write_trajectories(const TrajectoryOracle& oracle, const LearnedModel& model,
                        const std::vector<std::vector<double>>& inputs, double horizon,
                        std::ostream& out, std::size_t points, std::string_view config_hash) {
  if (!config_hash.empty()) out << "# config_hash=" << config_hash << "\n";
  out << "trajectory,t,y,z\n";
  const auto times = even_times(horizon, points);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto y = oracle.evaluate_many(inputs[i], times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      out << i << ',' << format_double(times[k]) << ',' << format_double(y[k]) << ','
          << format_double(model.evaluate(inputs[i], times[k])) << "\n";
    }
  }
}

}  // namespace pacmc
