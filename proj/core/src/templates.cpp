#include "pacmc/templates.hpp"

#include <sstream>

#include "pacmc/error.hpp"
#include "pacmc/sampling.hpp"

namespace pacmc {
namespace {

// All exponent vectors of length `vars` with total degree exactly `total`,
// first variable's exponent descending.
void emit_degree(std::size_t vars, int total, std::vector<int>& prefix,
                 std::vector<std::vector<int>>& out) {
  if (prefix.size() + 1 == vars) {
    prefix.push_back(total);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int e = total; e >= 0; --e) {
    prefix.push_back(e);
    emit_degree(vars, total - e, prefix, out);
    prefix.pop_back();
  }
}

std::vector<std::vector<int>> grlex_exponents(std::size_t vars, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> prefix;
  for (int total = 0; total <= degree; ++total) emit_degree(vars, total, prefix, out);
  return out;
}

// powers[v * (degree + 1) + e] = value_v^e by repeated multiplication.
void power_table(std::span<const double> vars, int degree, std::vector<double>& powers) {
  const std::size_t stride = static_cast<std::size_t>(degree) + 1;
  powers.assign(vars.size() * stride, 1.0);
  for (std::size_t v = 0; v < vars.size(); ++v) {
    for (int e = 1; e <= degree; ++e) {
      powers[v * stride + e] = powers[v * stride + e - 1] * vars[v];
    }
  }
}

}  // namespace

std::size_t monomial_count(std::size_t input_dimension, int degree) {
  // C(n + 1 + d, d) computed incrementally; exact for the sizes used here.
  std::size_t result = 1;
  const std::size_t vars = input_dimension + 1;
  for (int i = 1; i <= degree; ++i) {
    result = result * (vars + static_cast<std::size_t>(i)) / static_cast<std::size_t>(i);
  }
  return result;
}

ModelTemplate ModelTemplate::poly_time(int degree, double time_scale) {
  if (degree < 0) throw ContractError("polynomial degree must be >= 0");
  if (!(time_scale > 0.0)) throw ContractError("time scale must be positive");
  ModelTemplate m;
  m.kind_ = Kind::PolyTime;
  m.degree_ = degree;
  m.time_scale_ = time_scale;
  m.exponents_ = grlex_exponents(1, degree);
  m.description_ = "poly_time(degree=" + std::to_string(degree) +
                   "; time_scale=" + format_double(time_scale) + ")";
  return m;
}

ModelTemplate ModelTemplate::poly_input_time(std::size_t input_dimension, int degree,
                                             double time_scale) {
  if (input_dimension < 1) throw ContractError("input-dependent template needs n >= 1");
  if (degree < 0) throw ContractError("polynomial degree must be >= 0");
  if (!(time_scale > 0.0)) throw ContractError("time scale must be positive");
  ModelTemplate m;
  m.kind_ = Kind::PolyInputTime;
  m.input_dimension_ = input_dimension;
  m.degree_ = degree;
  m.time_scale_ = time_scale;
  m.exponents_ = grlex_exponents(input_dimension + 1, degree);
  m.description_ = "poly_input_time(n=" + std::to_string(input_dimension) +
                   ", degree=" + std::to_string(degree) +
                   "; time_scale=" + format_double(time_scale) + "; order=grlex)";
  return m;
}

ModelTemplate ModelTemplate::custom(std::string name, std::size_t input_dimension,
                                    std::vector<BasisFunction> basis) {
  if (basis.empty()) throw ContractError("custom template needs at least one basis function");
  ModelTemplate m;
  m.kind_ = Kind::Custom;
  m.input_dimension_ = input_dimension;
  m.custom_basis_ = std::move(basis);
  m.description_ = "custom(" + name + "; k=" + std::to_string(m.custom_basis_.size()) +
                   "; non-polynomial)";
  return m;
}

ModelTemplate freeze(const ModelTemplate& base, std::span<const double> c) {
  base.check_coefficients(c);
  ModelTemplate m;
  m.kind_ = ModelTemplate::Kind::Frozen;
  m.input_dimension_ = base.input_dimension();
  m.degree_ = base.degree();
  m.time_scale_ = base.time_scale();
  m.base_ = std::make_shared<const ModelTemplate>(base);
  m.frozen_c_.assign(c.begin(), c.end());
  m.description_ = "frozen(" + base.description() + ")";
  return m;
}

std::size_t ModelTemplate::size() const {
  switch (kind_) {
    case Kind::PolyTime:
    case Kind::PolyInputTime:
      return exponents_.size();
    case Kind::Frozen:
      return 1;
    case Kind::Custom:
      return custom_basis_.size();
  }
  return 0;
}

bool ModelTemplate::is_polynomial() const {
  switch (kind_) {
    case Kind::PolyTime:
    case Kind::PolyInputTime:
      return true;
    case Kind::Frozen:
      return base_->is_polynomial();
    case Kind::Custom:
      return false;
  }
  return false;
}

bool ModelTemplate::is_input_dependent() const {
  switch (kind_) {
    case Kind::PolyTime:
      return false;
    case Kind::PolyInputTime:
      return true;
    case Kind::Frozen:
      return base_->is_input_dependent();
    case Kind::Custom:
      return input_dimension_ > 0;
  }
  return false;
}

std::size_t ModelTemplate::free_coefficient_count() const {
  return kind_ == Kind::Frozen ? 0 : size();
}

double ModelTemplate::coefficient_scale(std::size_t l) const {
  if (kind_ != Kind::PolyTime && kind_ != Kind::PolyInputTime) return 1.0;
  double scale = 1.0;
  for (int p = 0; p < exponents_.at(l).back(); ++p) scale *= time_scale_;
  return scale;
}

void ModelTemplate::check_coefficients(std::span<const double> c) const {
  if (c.size() != size()) {
    throw ContractError("template '" + description_ + "' has " + std::to_string(size()) +
                        " coefficients, got " + std::to_string(c.size()));
  }
}

void ModelTemplate::basis(std::span<const double> x0, double t, std::span<double> out) const {
  if (out.size() != size()) throw ContractError("basis output has wrong length");
  switch (kind_) {
    case Kind::PolyTime: {
      const double s = t / time_scale_;
      double p = 1.0;
      for (std::size_t l = 0; l < out.size(); ++l) {
        out[l] = p;
        p *= s;
      }
      return;
    }
    case Kind::PolyInputTime: {
      if (x0.size() != input_dimension_) {
        throw ContractError("input has dimension " + std::to_string(x0.size()) +
                            ", template expects " + std::to_string(input_dimension_));
      }
      std::vector<double> vars(x0.begin(), x0.end());
      vars.push_back(t / time_scale_);
      std::vector<double> powers;
      power_table(vars, degree_, powers);
      const std::size_t stride = static_cast<std::size_t>(degree_) + 1;
      for (std::size_t l = 0; l < out.size(); ++l) {
        double v = 1.0;
        const auto& e = exponents_[l];
        for (std::size_t var = 0; var < vars.size(); ++var) {
          v *= powers[var * stride + static_cast<std::size_t>(e[var])];
        }
        out[l] = v;
      }
      return;
    }
    case Kind::Frozen:
      out[0] = base_->evaluate(frozen_c_, x0, t);
      return;
    case Kind::Custom:
      for (std::size_t l = 0; l < out.size(); ++l) out[l] = custom_basis_[l](x0, t);
      return;
  }
}

double ModelTemplate::evaluate(std::span<const double> c, std::span<const double> x0,
                               double t) const {
  check_coefficients(c);
  std::vector<double> phi(size());
  basis(x0, t, phi);
  double z = 0.0;
  for (std::size_t l = 0; l < phi.size(); ++l) z += c[l] * phi[l];
  return z;
}

Interval ModelTemplate::evaluate_interval(std::span<const double> c,
                                          std::span<const Interval> inputs,
                                          Interval time) const {
  check_coefficients(c);
  switch (kind_) {
    case Kind::Custom:
      throw ContractError("interval evaluation is not available for custom templates");
    case Kind::Frozen:
      return Interval(c[0]) * base_->evaluate_interval(frozen_c_, inputs, time);
    case Kind::PolyTime:
    case Kind::PolyInputTime:
      break;
  }
  if (kind_ == Kind::PolyInputTime && inputs.size() != input_dimension_) {
    throw ContractError("interval input box has wrong dimension");
  }
  const Interval s = time * Interval(interval_detail::down(1.0 / time_scale_),
                                     interval_detail::up(1.0 / time_scale_));
  Interval acc(0.0);
  for (std::size_t l = 0; l < exponents_.size(); ++l) {
    const auto& e = exponents_[l];
    Interval term(c[l]);
    if (kind_ == Kind::PolyInputTime) {
      for (std::size_t v = 0; v < input_dimension_; ++v) {
        if (e[v] > 0) term = term * pow(inputs[v], e[v]);
      }
    }
    if (e.back() > 0) term = term * pow(s, e.back());
    acc = acc + term;
  }
  return acc;
}

std::vector<double> ModelTemplate::restrict_to_input(std::span<const double> c,
                                                     std::span<const double> x0) const {
  check_coefficients(c);
  switch (kind_) {
    case Kind::Custom:
      throw ContractError("custom templates have no polynomial restriction");
    case Kind::Frozen: {
      auto p = base_->restrict_to_input(frozen_c_, x0);
      for (double& v : p) v *= c[0];
      return p;
    }
    case Kind::PolyTime:
      return {c.begin(), c.end()};
    case Kind::PolyInputTime:
      break;
  }
  if (x0.size() != input_dimension_) throw ContractError("input has wrong dimension");
  std::vector<double> poly(static_cast<std::size_t>(degree_) + 1, 0.0);
  for (std::size_t l = 0; l < exponents_.size(); ++l) {
    const auto& e = exponents_[l];
    double v = c[l];
    for (std::size_t i = 0; i < input_dimension_; ++i) {
      for (int p = 0; p < e[i]; ++p) v *= x0[i];
    }
    poly[static_cast<std::size_t>(e.back())] += v;
  }
  return poly;
}

std::vector<double> LearnedModel::raw_coefficients() const {
  std::vector<double> raw(coefficients.size());
  for (std::size_t l = 0; l < raw.size(); ++l) {
    raw[l] = coefficients[l] / model_template.coefficient_scale(l);
  }
  return raw;
}

}  // namespace pacmc
