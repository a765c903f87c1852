#include "pacmc/scenario.hpp"

#include <cmath>
#include <string>

#include "pacmc/error.hpp"
#include "pacmc/parallel.hpp"

namespace pacmc {
namespace {

void check_bounds(double u_c, double u_xi) {
  if (!(u_c > 0.0) || !(u_xi > 0.0)) throw ContractError("U_c and U_xi must be positive");
}

LearnedModel solve_into_model(const Dataset& ds, const ModelTemplate& tmpl, double u_c,
                              double u_xi, const LpOptions& options) {
  const LinearProgram lp = build_lp(ds, tmpl, u_c, u_xi);
  const LpSolution sol = solve_lp(lp, options);
  if (sol.status == LpStatus::BoundInfeasible) {
    throw BoundInfeasible("minimax fit needs xi = " + format_double(sol.xi) +
                          " which exceeds U_xi = " + format_double(u_xi));
  }
  LearnedModel model{tmpl, {}, sol.xi, {}};
  model.coefficients.assign(sol.x.begin(), sol.x.end() - 1);
  Provenance& p = model.provenance;
  p.time_samples = ds.time_count();
  p.input_samples = ds.input_count();
  p.u_c = u_c;
  p.u_xi = u_xi;
  p.seed = ds.seed;
  p.input_set = ds.set_description;
  return model;
}

}  // namespace

LinearProgram build_lp(const Dataset& ds, const ModelTemplate& tmpl, double u_c, double u_xi) {
  check_bounds(u_c, u_xi);
  const std::size_t n_in = ds.input_count();
  const std::size_t n_t = ds.time_count();
  if (n_in == 0 || n_t == 0) throw ContractError("dataset is empty");
  if (ds.values.size() != n_in * n_t) throw ContractError("dataset grid has wrong size");
  if (tmpl.input_dimension() != 0 && tmpl.input_dimension() != ds.input_dimension()) {
    throw ContractError("template expects input dimension " +
                        std::to_string(tmpl.input_dimension()) + ", dataset has " +
                        std::to_string(ds.input_dimension()));
  }

  const std::size_t k = tmpl.size();
  LinearProgram lp;
  lp.cols = k + 1;
  lp.rows = 2 * n_in * n_t;
  lp.a.assign(lp.rows * lp.cols, 0.0);
  lp.b.assign(lp.rows, 0.0);
  lp.lower.resize(lp.cols);
  lp.upper.resize(lp.cols);
  for (std::size_t l = 0; l < k; ++l) {
    if (tmpl.kind() == ModelTemplate::Kind::Frozen) {
      lp.lower[l] = lp.upper[l] = 1.0;
    } else {
      const double bound = u_c * tmpl.coefficient_scale(l);
      lp.lower[l] = -bound;
      lp.upper[l] = bound;
    }
  }
  lp.lower[k] = 0.0;
  lp.upper[k] = u_xi;

  parallel_for(n_in, [&](std::size_t i) {
    std::vector<double> phi(k);
    for (std::size_t j = 0; j < n_t; ++j) {
      tmpl.basis(ds.inputs[i], ds.times[j], phi);
      for (std::size_t l = 0; l < k; ++l) {
        if (!std::isfinite(phi[l])) {
          throw ModelDomainError("basis function " + std::to_string(l + 1) +
                                 " is not finite at data point (i=" + std::to_string(i + 1) +
                                 ", j=" + std::to_string(j + 1) + ")");
        }
      }
      const std::size_t row = 2 * (i * n_t + j);
      const double y = ds.value(i, j);
      double* plus = &lp.a[row * lp.cols];
      double* minus = plus + lp.cols;
      for (std::size_t l = 0; l < k; ++l) {
        plus[l] = phi[l];
        minus[l] = -phi[l];
      }
      plus[k] = -1.0;
      minus[k] = -1.0;
      lp.b[row] = y;
      lp.b[row + 1] = -y;
    }
  });
  return lp;
}

SampleSizes required_samples(const Budget& budget) {
  if (const auto* b = std::get_if<PacBudget>(&budget)) {
    b->validate();
    return {min_samples(b->epsilon, b->beta, b->decision_dims), 1};
  }
  return two_level_budget(std::get<TwoLevelBudget>(budget));
}

LearnedModel fit(const Dataset& ds, const ModelTemplate& tmpl, double u_c, double u_xi,
                 const LpOptions& options) {
  return solve_into_model(ds, tmpl, u_c, u_xi, options);
}

LearnedModel learn(const Dataset& ds, const ModelTemplate& tmpl, double u_c, double u_xi,
                   const Budget& budget, const LpOptions& options) {
  if (decision_dims(budget) != tmpl.decision_dims()) {
    throw ContractError("budget is for " + std::to_string(decision_dims(budget)) +
                        " decision variables, template has " +
                        std::to_string(tmpl.decision_dims()));
  }
  const SampleSizes need = required_samples(budget);
  if (ds.time_count() < need.times) {
    throw InsufficientSamples(describe(budget) + " requires M >= " + std::to_string(need.times) +
                              " time samples, dataset provides " +
                              std::to_string(ds.time_count()));
  }
  if (std::holds_alternative<TwoLevelBudget>(budget) && ds.input_count() < need.inputs) {
    throw InsufficientSamples(describe(budget) + " requires N >= " +
                              std::to_string(need.inputs) + " inputs, dataset provides " +
                              std::to_string(ds.input_count()));
  }
  LearnedModel model = solve_into_model(ds, tmpl, u_c, u_xi, options);
  model.provenance.budget = budget;
  return model;
}

Dataset draw_dataset(const TrajectoryOracle& oracle, const InputSet& set, SampleSizes sizes,
                     std::uint64_t seed, std::string_view stream_prefix) {
  if (set.dimension() != oracle.input_dimension()) {
    throw ContractError("input set has dimension " + std::to_string(set.dimension()) +
                        ", system expects " + std::to_string(oracle.input_dimension()));
  }
  const std::string prefix(stream_prefix);
  RandomStream time_rng(seed, prefix + "times");
  RandomStream input_rng(seed, prefix + "inputs");
  const auto times = sample_times(oracle.horizon(), sizes.times, time_rng);
  const auto inputs = sample_inputs(set, sizes.inputs, input_rng);
  Dataset ds = collect_dataset(oracle, inputs, times);
  ds.seed = seed;
  ds.set_description = set.describe();
  return ds;
}

LearnedModel staged_learn_from_data(const Dataset& pilot, const Dataset& fresh,
                                    const ModelTemplate& tmpl, const Budget& full_budget,
                                    double u_c, double u_xi) {
  if (decision_dims(full_budget) != 1) {
    throw ContractError("staged budget must be stated for one decision variable");
  }
  const LearnedModel phase1 = fit(pilot, tmpl, u_c, u_xi);
  const ModelTemplate frozen = freeze(tmpl, phase1.coefficients);
  LearnedModel model = learn(fresh, frozen, u_c, u_xi, full_budget);
  model.provenance.staged = true;
  model.provenance.pilot_time_samples = pilot.time_count();
  model.provenance.pilot_input_samples = pilot.input_count();
  return model;
}

LearnedModel staged_learn(const TrajectoryOracle& oracle, const InputSet& set,
                          const ModelTemplate& tmpl, SampleSizes pilot,
                          const Budget& full_budget, double u_c, double u_xi,
                          std::uint64_t seed) {
  if (pilot.times < 1 || pilot.inputs < 1) throw ContractError("pilot sizes must be >= 1");
  const Dataset pilot_ds = draw_dataset(oracle, set, pilot, seed, kPilotPrefix);
  const Dataset fresh = draw_dataset(oracle, set, required_samples(full_budget), seed);
  return staged_learn_from_data(pilot_ds, fresh, tmpl, full_budget, u_c, u_xi);
}

}  // namespace pacmc
