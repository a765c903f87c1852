#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "pacmc/oracle.hpp"
#include "pacmc/sampling.hpp"
#include "pacmc/templates.hpp"

namespace pacmc {

// Grid 0, dt, 2 dt, ..., floor(T / dt) dt (last point clamped to T).
std::vector<double> validation_grid(double delta_t, double horizon);

// Fraction of grid points with |y(t) - z(t)| > xi, from one integration.
double validate_trajectory(const TrajectoryOracle& oracle, const LearnedModel& model,
                           std::span<const double> x0, double delta_t, double horizon);

struct TrajectoryResult {
  std::vector<double> input;
  double violation_fraction = 0.0;
};

struct ValidationSettings {
  std::size_t count = 200;
  double delta_t = 1e-3;
  double threshold = 0.0;
  std::uint64_t seed = 0;
};

struct ValidationReport {
  std::vector<TrajectoryResult> per_trajectory;  // draw order
  double ratio = 0.0;  // share of trajectories with fraction <= threshold
  ValidationSettings settings;
  double horizon = 0.0;
};

// Inputs come from stream "validation" of `seed`, disjoint from the
// training streams. Trajectories run concurrently.
ValidationReport validate_ensemble(const TrajectoryOracle& oracle, const LearnedModel& model,
                                   const InputSet& set, const ValidationSettings& settings);

std::vector<std::vector<double>> validation_inputs(const InputSet& set, std::size_t count,
                                                   std::uint64_t seed);

// One row per trajectory, then a '#' summary block.
void write_validation(const ValidationReport& report, std::ostream& out,
                      std::string_view config_hash = "");

// Plot data: columns t,z,z_minus_xi,z_plus_xi at `points` evenly spaced times.
void write_tube_curve(const LearnedModel& model, std::span<const double> x0, double horizon,
                      std::ostream& out, std::size_t points = 1000,
                      std::string_view config_hash = "");

// Long-format columns trajectory,t,y,z for each input at `points` times.
void write_trajectories(const TrajectoryOracle& oracle, const LearnedModel& model,
                        const std::vector<std::vector<double>>& inputs, double horizon,
                        std::ostream& out, std::size_t points = 1000,
                        std::string_view config_hash = "");

}  // namespace pacmc
