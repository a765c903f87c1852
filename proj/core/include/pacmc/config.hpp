#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pacmc/pac_bounds.hpp"
#include "pacmc/sampling.hpp"
#include "pacmc/templates.hpp"
#include "pacmc/verification.hpp"

namespace pacmc {

// INI file, sections:
//
//   [system]        name, horizon, step, l, dataset
//   [sampling]      input_set, inputs, seed, time_samples, input_samples
//   [template]      spec, time_scale
//   [budget]        epsilon, beta | epsilon1, beta1, epsilon2, beta2
//   [staged]        pilot_time_samples, pilot_input_samples
//   [scenario_lp]   u_c, u_xi
//   [verification]  unsafe, scope
//   [montecarlo]    count, delta_t, threshold, seed, plot_points, plot_trajectories
//
// Unknown sections or keys are errors. See configs/ for complete files.
struct ExperimentConfig {
  std::filesystem::path base_dir;  // relative paths resolve against this

  // [system]
  std::string system = "van_der_pol";  // benchmark name or "dataset"
  std::filesystem::path dataset;        // external data when system = dataset
  double horizon = 0.0;                 // 0: the system's default
  double step = 1e-4;
  int l = 50;

  // [sampling]
  std::optional<InputSet> input_set;
  std::vector<std::vector<double>> listed_inputs;  // "a, b; c, d"
  std::uint64_t seed = 1;
  std::size_t time_samples = 0;   // 0: from the budget
  std::size_t input_samples = 0;  // 0: from the budget

  // [template]
  std::string template_spec = "poly_time(degree=6)";
  double time_scale = 0.0;  // 0: horizon

  // [budget]
  std::optional<PacBudget> single;
  std::optional<TwoLevelBudget> two_level;

  // [staged]
  std::optional<SampleSizes> pilot;

  // [scenario_lp]
  double u_c = 100.0;
  double u_xi = 100.0;

  // [verification]
  UnsafeSet unsafe;
  std::optional<Scope> scope;  // default derived from the budget and inputs

  // [montecarlo]
  std::size_t mc_count = 200;
  double mc_delta_t = 1e-3;
  std::optional<double> mc_threshold;  // default: the certified epsilon
  std::uint64_t mc_seed = 0;           // 0: same as sampling seed
  std::size_t plot_points = 1000;
  std::size_t plot_trajectories = 20;

  bool has_oracle() const { return system != "dataset"; }
  bool staged() const { return pilot.has_value(); }

  double effective_horizon() const;
  double effective_time_scale() const { return time_scale > 0 ? time_scale : effective_horizon(); }
  std::size_t input_dimension() const;

  ModelTemplate model_template() const;
  // Budget with decision_dims filled in (1 when staged).
  Budget budget() const;
  // Configured sizes, defaulting to what the budget requires.
  SampleSizes sample_sizes() const;
  Scope effective_scope() const;
  VerificationScope verification_scope() const;
  double epsilon() const;  // epsilon or epsilon1
  double mc_threshold_value() const { return mc_threshold.value_or(epsilon()); }
  std::uint64_t mc_seed_value() const { return mc_seed ? mc_seed : seed; }

  // Fully defaulted INI echo; `hash` is FNV-1a over it, 16 hex digits.
  std::string effective_text() const;
  std::string hash() const;
};

// Throws ConfigError with the offending key.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// poly_time(degree=d), poly_input_time(degree=d), frozen(<model file>).
ModelTemplate parse_template_spec(const std::string& spec, std::size_t input_dimension,
                                  double time_scale,
                                  const std::filesystem::path& base_dir = {});

}  // namespace pacmc
