#include "pacmc/pac_bounds.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "pacmc/error.hpp"

namespace pacmc {
namespace {

// Relative slack absorbing rounding in ln() so exact-integer bounds do not
// pick up a spurious +1.
constexpr double kRelativeGuard = 1e-12;

void check_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    std::ostringstream os;
    os << name << " must lie in (0, 1), got " << v;
    throw ContractError(os.str());
  }
}

double bound_numerator(double beta, std::size_t dims) {
  return 2.0 * (std::log(1.0 / beta) + static_cast<double>(dims));
}

std::string shortest(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void PacBudget::validate() const {
  check_unit(epsilon, "epsilon");
  check_unit(beta, "beta");
  if (decision_dims < 1) throw ContractError("decision_dims must be >= 1");
}

void TwoLevelBudget::validate() const {
  check_unit(epsilon1, "epsilon1");
  check_unit(beta1, "beta1");
  check_unit(epsilon2, "epsilon2");
  check_unit(beta2, "beta2");
  if (decision_dims < 1) throw ContractError("decision_dims must be >= 1");
}

std::size_t min_samples(double epsilon, double beta, std::size_t decision_dims) {
  PacBudget{epsilon, beta, decision_dims}.validate();
  const double exact = bound_numerator(beta, decision_dims) / epsilon;
  const double guarded = exact * (1.0 - kRelativeGuard);
  return static_cast<std::size_t>(std::ceil(guarded));
}

double achieved_epsilon(std::size_t samples, double beta, std::size_t decision_dims) {
  if (samples < 1) throw ContractError("sample count must be >= 1");
  check_unit(beta, "beta");
  return bound_numerator(beta, decision_dims) / static_cast<double>(samples);
}

bool certifies(std::size_t samples, double epsilon, double beta, std::size_t decision_dims) {
  return samples >= min_samples(epsilon, beta, decision_dims);
}

SampleSizes two_level_budget(const TwoLevelBudget& budget) {
  budget.validate();
  return {min_samples(budget.epsilon1, budget.beta1, budget.decision_dims),
          min_samples(budget.epsilon2, budget.beta2, budget.decision_dims)};
}

std::size_t decision_dims(const Budget& budget) {
  return std::visit([](const auto& b) { return b.decision_dims; }, budget);
}

std::string describe(const Budget& budget) {
  std::ostringstream os;
  if (const auto* b = std::get_if<PacBudget>(&budget)) {
    os << "epsilon=" << shortest(b->epsilon) << " beta=" << shortest(b->beta)
       << " dims=" << b->decision_dims;
  } else {
    const auto& t = std::get<TwoLevelBudget>(budget);
    os << "epsilon1=" << shortest(t.epsilon1) << " beta1=" << shortest(t.beta1)
       << " epsilon2=" << shortest(t.epsilon2) << " beta2=" << shortest(t.beta2)
       << " dims=" << t.decision_dims;
  }
  return os.str();
}

}  // namespace pacmc
