#pragma once

#include <cstddef>
#include <string>
#include <variant>

namespace pacmc {

// Error level epsilon and confidence parameter beta for a scenario program
// with `decision_dims` decision variables (template coefficients plus xi).
struct PacBudget {
  double epsilon = 0.0;
  double beta = 0.0;
  std::size_t decision_dims = 1;

  void validate() const;  // throws ContractError
};

// Time-level (epsilon1, beta1) and input-level (epsilon2, beta2) budgets for
// statements over the whole input set.
struct TwoLevelBudget {
  double epsilon1 = 0.0;
  double beta1 = 0.0;
  double epsilon2 = 0.0;
  double beta2 = 0.0;
  std::size_t decision_dims = 1;

  void validate() const;
};

using Budget = std::variant<PacBudget, TwoLevelBudget>;

struct SampleSizes {
  std::size_t times = 0;   // M
  std::size_t inputs = 0;  // N
};

// Smallest K with epsilon >= (2/K)(ln(1/beta) + decision_dims).
std::size_t min_samples(double epsilon, double beta, std::size_t decision_dims);

// The epsilon certified by K samples: (2/K)(ln(1/beta) + decision_dims).
double achieved_epsilon(std::size_t samples, double beta, std::size_t decision_dims);

// True when K samples certify (epsilon, beta) for this many decision variables.
bool certifies(std::size_t samples, double epsilon, double beta, std::size_t decision_dims);

SampleSizes two_level_budget(const TwoLevelBudget& budget);

std::size_t decision_dims(const Budget& budget);
std::string describe(const Budget& budget);

}  // namespace pacmc
