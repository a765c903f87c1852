#pragma once

#include <cstdint>
#include <string_view>

#include "pacmc/oracle.hpp"
#include "pacmc/pac_bounds.hpp"
#include "pacmc/sampling.hpp"
#include "pacmc/simplex.hpp"
#include "pacmc/templates.hpp"

namespace pacmc {

constexpr double kDefaultCoefficientBound = 100.0;
constexpr double kDefaultXiBound = 100.0;

// Minimax scenario program over a dataset: variables (c_1..c_k, xi), rows
// +-(sum_l c_l phi_l(x0_i, t_j) - y_ij) <= xi ordered i-major, j-minor,
// '+' before '-'. Coefficient l is bounded by u_c * coefficient_scale(l),
// i.e. |c_l| <= u_c in the unscaled-time basis. Frozen templates pin their
// coefficient at 1.
LinearProgram build_lp(const Dataset& ds, const ModelTemplate& tmpl, double u_c, double u_xi);

// Minimax fit with the sample-size guard of `budget`. The budget's
// decision_dims must match the template's. Throws InsufficientSamples,
// BoundInfeasible or SolverStall.
LearnedModel learn(const Dataset& ds, const ModelTemplate& tmpl, double u_c, double u_xi,
                   const Budget& budget, const LpOptions& options = {});

// Same fit without any sample-size guard or PAC claim.
LearnedModel fit(const Dataset& ds, const ModelTemplate& tmpl, double u_c, double u_xi,
                 const LpOptions& options = {});

// Samples required by `budget`: M from (epsilon, beta) or (epsilon1,
// beta1), N from (epsilon2, beta2) or 1 for a single-trajectory budget.
SampleSizes required_samples(const Budget& budget);

// Times from stream "<prefix>times", inputs from "<prefix>inputs".
Dataset draw_dataset(const TrajectoryOracle& oracle, const InputSet& set, SampleSizes sizes,
                     std::uint64_t seed, std::string_view stream_prefix = "");

inline constexpr std::string_view kPilotPrefix = "pilot.";

// Two-phase fit: coefficients from a pilot dataset, then only xi re-fitted
// on a fresh dataset against the frozen template. `full_budget` must have
// decision_dims == 1; it alone sizes and certifies phase 2.
LearnedModel staged_learn(const TrajectoryOracle& oracle, const InputSet& set,
                          const ModelTemplate& tmpl, SampleSizes pilot,
                          const Budget& full_budget, double u_c, double u_xi,
                          std::uint64_t seed);

LearnedModel staged_learn_from_data(const Dataset& pilot, const Dataset& fresh,
                                    const ModelTemplate& tmpl, const Budget& full_budget,
                                    double u_c, double u_xi);

}  // namespace pacmc
