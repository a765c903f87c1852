#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pacmc/interval.hpp"
#include "pacmc/pac_bounds.hpp"

namespace pacmc {

using BasisFunction = std::function<double(std::span<const double> x0, double t)>;

// Linearly parameterised model w(c, x0, t) = sum_l c_l phi_l(x0, t).
//
// Polynomial templates evaluate their monomials in the scaled time
// s = t / time_scale, which keeps degree-6 bases over [0, 10] well
// conditioned. Coefficients therefore live in the scaled basis;
// coefficient_scale(l) = time_scale^p (p = time power of monomial l) maps
// them back to the raw-time basis.
//
// Monomial order (graded lexicographic): total degree ascending, then the
// exponent of x0_1 descending, then x0_2, ..., finally t. For n = 2, d = 1:
// 1, x0_1, x0_2, t.
class ModelTemplate {
 public:
  enum class Kind { PolyTime, PolyInputTime, Frozen, Custom };

  static ModelTemplate poly_time(int degree, double time_scale = 1.0);
  static ModelTemplate poly_input_time(std::size_t input_dimension, int degree,
                                       double time_scale = 1.0);
  // Arbitrary basis; flagged non-polynomial, so verification falls back to
  // grid evaluation for it.
  static ModelTemplate custom(std::string name, std::size_t input_dimension,
                              std::vector<BasisFunction> basis);

  Kind kind() const { return kind_; }
  std::size_t size() const;  // k
  std::size_t input_dimension() const { return input_dimension_; }
  double time_scale() const { return time_scale_; }
  int degree() const { return degree_; }
  bool is_polynomial() const;
  bool is_input_dependent() const;
  const std::string& description() const { return description_; }

  // Coefficients the LP may choose. Frozen templates fix their single
  // coefficient at 1, leaving only xi.
  std::size_t free_coefficient_count() const;
  std::size_t decision_dims() const { return free_coefficient_count() + 1; }

  // Exponent rows (n input exponents followed by the time exponent).
  // Empty for frozen and custom templates.
  const std::vector<std::vector<int>>& exponents() const { return exponents_; }
  double coefficient_scale(std::size_t l) const;

  // phi_l(x0, t) for all l; out.size() must equal size().
  void basis(std::span<const double> x0, double t, std::span<double> out) const;
  double evaluate(std::span<const double> c, std::span<const double> x0, double t) const;

  // Enclosure of w(c, x0, t) over x0 in `inputs` (one interval per input
  // axis; ignored for input-independent templates) and t in `time`.
  // Throws ContractError for custom templates.
  Interval evaluate_interval(std::span<const double> c, std::span<const Interval> inputs,
                             Interval time) const;

  // Univariate polynomial in s = t / time_scale that this template reduces
  // to at a fixed input (coefficients ascending in s). Only for polynomial
  // templates, including frozen polynomial ones.
  std::vector<double> restrict_to_input(std::span<const double> c,
                                        std::span<const double> x0) const;

  // Frozen templates only.
  const ModelTemplate* frozen_base() const { return base_.get(); }
  const std::vector<double>& frozen_coefficients() const { return frozen_c_; }

  friend ModelTemplate freeze(const ModelTemplate& base, std::span<const double> c);

 private:
  ModelTemplate() = default;
  void check_coefficients(std::span<const double> c) const;

  Kind kind_ = Kind::PolyTime;
  std::size_t input_dimension_ = 0;
  int degree_ = 0;
  double time_scale_ = 1.0;
  std::string description_;
  std::vector<std::vector<int>> exponents_;
  std::vector<BasisFunction> custom_basis_;
  std::shared_ptr<const ModelTemplate> base_;
  std::vector<double> frozen_c_;
};

// Template whose single basis function is base evaluated at c.
ModelTemplate freeze(const ModelTemplate& base, std::span<const double> c);

// C(n + 1 + d, d): number of monomials in n inputs and t of degree <= d.
std::size_t monomial_count(std::size_t input_dimension, int degree);

struct Provenance {
  std::size_t time_samples = 0;   // M
  std::size_t input_samples = 0;  // N
  double u_c = 0.0;
  double u_xi = 0.0;
  std::uint64_t seed = 0;
  std::optional<Budget> budget;
  bool staged = false;
  std::size_t pilot_time_samples = 0;
  std::size_t pilot_input_samples = 0;
  std::string input_set;
  std::string config_hash;
};

struct LearnedModel {
  ModelTemplate model_template;
  std::vector<double> coefficients;
  double xi = 0.0;
  Provenance provenance;

  double evaluate(std::span<const double> x0, double t) const {
    return model_template.evaluate(coefficients, x0, t);
  }
  // Coefficients in the unscaled-time basis: c_l / coefficient_scale(l).
  std::vector<double> raw_coefficients() const;
};

}  // namespace pacmc
