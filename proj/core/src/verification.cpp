#include "pacmc/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <queue>
#include <sstream>

#include "pacmc/error.hpp"
#include "pacmc/polynomial.hpp"
#include "pacmc/rng.hpp"

namespace pacmc {
namespace {

using interval_detail::down;
using interval_detail::up;

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

double parse_num(const std::string& s, std::string_view whole) {
  double v;
  if (!parse_double(trim(s), v)) {
    throw ConfigError("bad number '" + s + "' in unsafe set '" + std::string(whole) + "'");
  }
  return v;
}

std::vector<double> restrict(const LearnedModel& m, std::span<const double> x0) {
  return m.model_template.restrict_to_input(m.coefficients, x0);
}

// Inputs at which grid modes evaluate the model.
std::vector<std::vector<double>> grid_inputs(const VerificationScope& scope,
                                             std::size_t count) {
  if (scope.kind != Scope::AllInputs) return scope.inputs;
  const InputSet& set = *scope.set;
  std::vector<std::vector<double>> out;
  if (set.shape() == InputSet::Shape::Ball) {
    out.push_back(set.center());
  } else {
    out.push_back(set.lower());
    out.push_back(set.upper());
  }
  RandomStream rng(0, "verification.grid");
  for (std::size_t i = 0; i < count; ++i) out.push_back(set.sample(rng));
  return out;
}

std::vector<double> grid_times(double horizon, std::size_t count) {
  count = std::max<std::size_t>(count, 2);
  std::vector<double> t(count);
  for (std::size_t k = 0; k < count; ++k) {
    t[k] = horizon * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  t.back() = horizon;
  return t;
}

struct Box {
  std::vector<Interval> x;
  Interval t;
  double ub;
  int depth;
  std::size_t seq;
};

struct BoxOrder {
  bool operator()(const Box& a, const Box& b) const {
    if (a.ub != b.ub) return a.ub < b.ub;
    return a.seq > b.seq;
  }
};

// Upper bound on max of w(c, x0, t) over box x [0, T], best-first.
double box_maximum(const ModelTemplate& tmpl, const std::vector<double>& c,
                   const InputSet& set, double horizon, const RangeSettings& s) {
  const std::size_t n = set.dimension();
  std::priority_queue<Box, std::vector<Box>, BoxOrder> queue;
  std::size_t seq = 0;
  double best_lb = -UnsafeSet::kInfinity;
  std::vector<double> mid(n);

  auto push = [&](std::vector<Interval> x, Interval t, int depth, double cap) {
    const double ub = std::min(cap, tmpl.evaluate_interval(c, x, t).hi);
    for (std::size_t i = 0; i < n; ++i) mid[i] = x[i].mid();
    best_lb = std::max(best_lb, tmpl.evaluate(c, mid, t.mid()));
    queue.push({std::move(x), t, ub, depth, seq++});
  };

  std::vector<Interval> root(n);
  for (std::size_t i = 0; i < n; ++i) root[i] = {set.lower()[i], set.upper()[i]};
  push(root, {0.0, horizon}, 0, UnsafeSet::kInfinity);

  std::size_t boxes = 1;
  while (true) {
    const Box& top = queue.top();
    if (top.ub - best_lb < s.gap_tol || top.depth >= s.max_depth || boxes >= s.max_boxes) {
      return top.ub;
    }
    Box b = top;
    queue.pop();
    // Widest axis, time measured in template units.
    std::size_t axis = n;
    double widest = b.t.width() / tmpl.time_scale();
    for (std::size_t i = 0; i < n; ++i) {
      if (b.x[i].width() > widest) {
        widest = b.x[i].width();
        axis = i;
      }
    }
    auto left = b.x;
    auto right = b.x;
    Interval lt = b.t;
    Interval rt = b.t;
    if (axis == n) {
      const double m = b.t.mid();
      lt.hi = m;
      rt.lo = m;
    } else {
      const double m = b.x[axis].mid();
      left[axis].hi = m;
      right[axis].lo = m;
    }
    push(std::move(left), lt, b.depth + 1, b.ub);
    push(std::move(right), rt, b.depth + 1, b.ub);
    boxes += 2;
  }
}

Interval grid_extent(const LearnedModel& model, const VerificationScope& scope, double horizon,
                     const RangeSettings& s) {
  const auto inputs = grid_inputs(scope, s.grid_inputs);
  const auto times = grid_times(horizon, s.grid_times);
  double lo = UnsafeSet::kInfinity;
  double hi = -UnsafeSet::kInfinity;
  const std::vector<double> none;
  for (const auto& x0 : inputs.empty() ? std::vector<std::vector<double>>{none} : inputs) {
    for (double t : times) {
      const double z = model.evaluate(x0, t);
      lo = std::min(lo, z);
      hi = std::max(hi, z);
    }
  }
  return {lo, hi};
}

// Measure of {s in [0, S] : p(s) in some expanded piece}, in s units.
double univariate_tau(const std::vector<double>& p, const std::vector<Interval>& expanded,
                      double s_end, double tol) {
  std::vector<poly::Bracket> brackets;
  for (const Interval& piece : expanded) {
    for (double thr : {piece.lo, piece.hi}) {
      if (!std::isfinite(thr)) continue;
      std::vector<double> q = p;
      q[0] -= thr;
      for (const auto& b : poly::roots(q, 0.0, s_end, tol)) brackets.push_back(b);
    }
  }
  std::sort(brackets.begin(), brackets.end(),
            [](const poly::Bracket& a, const poly::Bracket& b) { return a.lo < b.lo; });
  std::vector<poly::Bracket> merged;
  for (const auto& b : brackets) {
    if (!merged.empty() && b.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, b.hi);
    } else {
      merged.push_back(b);
    }
  }
  auto inside = [&](double s) {
    const double z = poly::eval(p, s);
    for (const Interval& piece : expanded) {
      if (piece.lo <= z && z <= piece.hi) return true;
    }
    return false;
  };
  double total = 0.0;
  double cursor = 0.0;
  for (const auto& b : merged) {
    if (b.lo > cursor && inside(cursor + 0.5 * (b.lo - cursor))) total += b.lo - cursor;
    total += b.hi - b.lo;
    cursor = std::max(cursor, b.hi);
  }
  if (s_end > cursor && inside(cursor + 0.5 * (s_end - cursor))) total += s_end - cursor;
  return std::min(up(total), s_end);
}

std::vector<Interval> expand(const UnsafeSet& uns, double xi) {
  std::vector<Interval> out;
  for (const Interval& p : uns.pieces()) out.push_back({down(p.lo - xi), up(p.hi + xi)});
  return out;
}

bool same_budget(const Budget& a, const Budget& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<PacBudget>(&a)) {
    const auto& y = std::get<PacBudget>(b);
    return x->epsilon == y.epsilon && x->beta == y.beta && x->decision_dims == y.decision_dims;
  }
  const auto& x = std::get<TwoLevelBudget>(a);
  const auto& y = std::get<TwoLevelBudget>(b);
  return x.epsilon1 == y.epsilon1 && x.beta1 == y.beta1 && x.epsilon2 == y.epsilon2 &&
         x.beta2 == y.beta2 && x.decision_dims == y.decision_dims;
}

}  // namespace

UnsafeSet::UnsafeSet(std::vector<Interval> pieces) {
  std::erase_if(pieces, [](const Interval& p) { return !(p.lo <= p.hi); });
  std::sort(pieces.begin(), pieces.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const Interval& p : pieces) {
    if (!pieces_.empty() && p.lo <= pieces_.back().hi) {
      pieces_.back().hi = std::max(pieces_.back().hi, p.hi);
    } else {
      pieces_.push_back(p);
    }
  }
}

UnsafeSet UnsafeSet::parse(std::string_view text) {
  std::vector<Interval> pieces;
  const std::string whole = trim(text);
  if (whole.empty() || whole == "none") return {};
  std::stringstream ss(whole);
  std::string item;
  while (std::getline(ss, item, ';')) {
    std::string p = trim(item);
    p.erase(std::remove(p.begin(), p.end(), ' '), p.end());
    if (p.starts_with("y>=")) {
      pieces.push_back({parse_num(p.substr(3), text), kInfinity});
    } else if (p.starts_with("y<=")) {
      pieces.push_back({-kInfinity, parse_num(p.substr(3), text)});
    } else if (p.size() >= 2 && p.front() == '[' && p.back() == ']') {
      const auto comma = p.find(',');
      if (comma == std::string::npos) throw ConfigError("unsafe interval needs 'a,b': " + p);
      const double a = parse_num(p.substr(1, comma - 1), text);
      const double b = parse_num(p.substr(comma + 1, p.size() - comma - 2), text);
      if (!(a <= b)) throw ConfigError("unsafe interval has a > b: " + p);
      pieces.push_back({a, b});
    } else {
      throw ConfigError("cannot parse unsafe set piece '" + p + "'");
    }
  }
  return UnsafeSet(std::move(pieces));
}

bool UnsafeSet::intersects(double lo, double hi) const {
  for (const Interval& p : pieces_) {
    if (p.lo <= hi && lo <= p.hi) return true;
  }
  return false;
}

std::string UnsafeSet::describe() const {
  if (pieces_.empty()) return "none";
  std::string out;
  for (const Interval& p : pieces_) {
    if (!out.empty()) out += "; ";
    if (p.hi == kInfinity) {
      out += "y>=" + format_double(p.lo);
    } else if (p.lo == -kInfinity) {
      out += "y<=" + format_double(p.hi);
    } else {
      out += "[" + format_double(p.lo) + "," + format_double(p.hi) + "]";
    }
  }
  return out;
}

VerificationScope VerificationScope::one(std::vector<double> x0) {
  VerificationScope s;
  s.kind = Scope::OneTrajectory;
  s.inputs.push_back(std::move(x0));
  return s;
}

VerificationScope VerificationScope::listed(std::vector<std::vector<double>> inputs) {
  if (inputs.empty()) throw ContractError("listed scope needs at least one input");
  VerificationScope s;
  s.kind = Scope::ListedInputs;
  s.inputs = std::move(inputs);
  return s;
}

VerificationScope VerificationScope::all(InputSet set) {
  VerificationScope s;
  s.kind = Scope::AllInputs;
  s.set = std::move(set);
  return s;
}

std::string VerificationScope::describe() const {
  auto point = [](const std::vector<double>& x) {
    std::string out = "(";
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i) out += ", ";
      out += short_num(x[i]);
    }
    return out + ")";
  };
  switch (kind) {
    case Scope::OneTrajectory:
      return "x0 = " + point(inputs.front());
    case Scope::ListedInputs:
      return std::to_string(inputs.size()) + " listed inputs";
    case Scope::AllInputs:
      return "X0 = " + set->describe();
  }
  return {};
}

TubeRange tube_range(const LearnedModel& model, const VerificationScope& scope, double horizon,
                     const RangeSettings& settings) {
  if (!(horizon > 0.0)) throw ContractError("horizon must be positive");
  const ModelTemplate& tmpl = model.model_template;
  if (tmpl.is_input_dependent()) {
    const std::size_t n = scope.kind == Scope::AllInputs ? scope.set->dimension()
                                                         : scope.inputs.front().size();
    if (n != tmpl.input_dimension()) throw ContractError("scope dimension does not match model");
  }
  TubeRange out;
  out.domain = scope.describe() + ", t in [0, " + format_double(horizon) + "]";
  Interval z;
  if (tmpl.is_polynomial()) {
    const double s_end = horizon / tmpl.time_scale();
    const double tol = settings.time_tol / tmpl.time_scale();
    if (!tmpl.is_input_dependent()) {
      z = poly::range(restrict(model, {}), 0.0, s_end, tol);
    } else if (scope.kind != Scope::AllInputs) {
      bool first = true;
      for (const auto& x0 : scope.inputs) {
        const Interval r = poly::range(restrict(model, x0), 0.0, s_end, tol);
        z = first ? r : hull(z, r);
        first = false;
      }
    } else {
      const double hi = box_maximum(tmpl, model.coefficients, *scope.set, horizon, settings);
      std::vector<double> neg(model.coefficients);
      for (double& v : neg) v = -v;
      const double lo = -box_maximum(tmpl, neg, *scope.set, horizon, settings);
      z = {lo, hi};
    }
  } else {
    z = grid_extent(model, scope, horizon, settings);
    out.rigor = Rigor::GridApproximate;
  }
  out.low = down(z.lo - model.xi);
  out.high = up(z.hi + model.xi);
  return out;
}

UnsafeTime unsafe_time_budget(const LearnedModel& model, const UnsafeSet& uns,
                              const VerificationScope& scope, double horizon, double epsilon,
                              const RangeSettings& settings) {
  UnsafeTime out;
  const std::vector<Interval> expanded = expand(uns, model.xi);
  const ModelTemplate& tmpl = model.model_template;
  if (uns.empty()) {
    out.bound = epsilon * horizon;
    return out;
  }
  if (tmpl.is_polynomial()) {
    const double s_end = horizon / tmpl.time_scale();
    const double tol = settings.time_tol / tmpl.time_scale();
    std::vector<std::vector<double>> inputs;
    if (!tmpl.is_input_dependent()) {
      inputs.push_back({});
    } else {
      inputs = grid_inputs(scope, settings.grid_inputs);
      if (scope.kind == Scope::AllInputs) out.rigor = Rigor::GridApproximate;
    }
    double tau_s = 0.0;
    for (const auto& x0 : inputs) {
      tau_s = std::max(tau_s, univariate_tau(restrict(model, x0), expanded, s_end, tol));
    }
    out.tau = std::min(horizon, up(tau_s * tmpl.time_scale()));
  } else {
    // Count grid cells with either end in the expanded set.
    out.rigor = Rigor::GridApproximate;
    const auto times = grid_times(horizon, settings.grid_times);
    auto inputs = grid_inputs(scope, settings.grid_inputs);
    if (inputs.empty()) inputs.push_back({});
    auto hit = [&](double z) {
      for (const Interval& p : expanded) {
        if (p.lo <= z && z <= p.hi) return true;
      }
      return false;
    };
    for (const auto& x0 : inputs) {
      double tau = 0.0;
      bool prev = hit(model.evaluate(x0, times[0]));
      for (std::size_t k = 1; k < times.size(); ++k) {
        const bool cur = hit(model.evaluate(x0, times[k]));
        if (prev || cur) tau += times[k] - times[k - 1];
        prev = cur;
      }
      out.tau = std::max(out.tau, std::min(tau, horizon));
    }
  }
  out.bound = epsilon * horizon + out.tau;
  return out;
}

Verdict check_safety(const LearnedModel& model, const UnsafeSet& uns,
                     const VerificationScope& scope, const Budget& budget, double horizon,
                     const RangeSettings& settings) {
  const bool two_level = std::holds_alternative<TwoLevelBudget>(budget);
  if (two_level != (scope.kind == Scope::AllInputs)) {
    throw ContractError(std::string("scope '") + to_string(scope.kind) + "' needs a " +
                        (scope.kind == Scope::AllInputs ? "two-level" : "single-level") +
                        " budget");
  }
  if (model.provenance.budget && !same_budget(*model.provenance.budget, budget)) {
    throw ContractError("budget (" + describe(budget) +
                        ") differs from the one the model was learned with (" +
                        describe(*model.provenance.budget) + ")");
  }
  std::visit([](const auto& b) { b.validate(); }, budget);
  const double eps = two_level ? std::get<TwoLevelBudget>(budget).epsilon1
                               : std::get<PacBudget>(budget).epsilon;

  Verdict v;
  v.budget = budget;
  v.scope = scope.kind;
  v.horizon = horizon;
  v.xi = model.xi;
  v.unsafe_description = uns.describe();
  v.scope_description = scope.describe();
  v.range = tube_range(model, scope, horizon, settings);
  v.rigor = v.range.rigor;
  if (!uns.intersects(v.range.low, v.range.high)) {
    v.kind = VerdictKind::SafeWithBudget;
    v.unsafe_time_bound = eps * horizon;
    return v;
  }
  const UnsafeTime ut = unsafe_time_budget(model, uns, scope, horizon, eps, settings);
  if (ut.rigor == Rigor::GridApproximate) v.rigor = Rigor::GridApproximate;
  v.tau = ut.tau;
  v.unsafe_time_bound = ut.bound;
  v.kind = ut.bound >= horizon ? VerdictKind::Inconclusive : VerdictKind::BudgetedWithTau;
  return v;
}

const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::SafeWithBudget:
      return "safe-with-budget";
    case VerdictKind::BudgetedWithTau:
      return "budgeted-with-tau";
    case VerdictKind::Inconclusive:
      return "inconclusive";
  }
  return "";
}

const char* to_string(Rigor r) {
  return r == Rigor::Certified ? "certified" : "grid-approximate";
}

const char* to_string(Scope s) {
  switch (s) {
    case Scope::OneTrajectory:
      return "one-trajectory";
    case Scope::ListedInputs:
      return "listed-inputs";
    case Scope::AllInputs:
      return "all-inputs";
  }
  return "";
}

std::string Verdict::text() const {
  std::ostringstream os;
  const std::string bound = unsafe_time_bound ? short_num(*unsafe_time_bound) : "?";
  const std::string T = short_num(horizon);
  os << "Verdict: " << to_string(kind) << " (" << to_string(rigor) << ")\n";
  os << "Tube z(t) +/- " << short_num(xi) << " over " << range.domain << " lies in ["
     << short_num(range.low) << ", " << short_num(range.high) << "]; unsafe set "
     << unsafe_description << ".\n";
  if (kind == VerdictKind::SafeWithBudget) {
    os << "The tube never meets the unsafe set.\n";
  } else {
    os << "The tube meets the unsafe set for at most tau = " << short_num(tau.value_or(0.0))
       << " time units.\n";
  }
  if (kind == VerdictKind::Inconclusive) {
    os << "Time bound " << bound << " is not below T = " << T << "; nothing is claimed.\n";
  } else if (const auto* b = std::get_if<PacBudget>(&budget)) {
    const std::string who = scope == Scope::OneTrajectory
                                ? "the trajectory from " + scope_description.substr(5)
                                : "each listed trajectory";
    os << "Claim: with confidence >= 1 - " << short_num(b->beta) << ", " << who
       << " is in the unsafe set for at most " << bound << " of the " << T
       << " time units.\n";
  } else {
    const auto& b2 = std::get<TwoLevelBudget>(budget);
    os << "Claim: with confidence >= 1 - " << short_num(b2.beta2)
       << " over the input draw, the inputs in " << scope_description.substr(5)
       << " for which the system is in the unsafe set for at most " << bound << " of the " << T
       << " time units (each at confidence >= 1 - " << short_num(b2.beta1)
       << ") have probability measure > " << short_num(1.0 - b2.epsilon2) << ".\n";
  }
  if (rigor == Rigor::GridApproximate) {
    os << "Caution: ranges come from grid evaluation and are not certified.\n";
  }
  return os.str();
}

void write_verdict(const Verdict& v, std::ostream& out, std::string_view config_hash) {
  out << v.text();
  out << "\n[verdict]\n";
  out << "kind=" << to_string(v.kind) << "\n";
  out << "rigor=" << to_string(v.rigor) << "\n";
  out << "scope=" << to_string(v.scope) << "\n";
  out << "scope_detail=" << v.scope_description << "\n";
  out << "horizon=" << format_double(v.horizon) << "\n";
  out << "xi=" << format_double(v.xi) << "\n";
  out << "tube_low=" << format_double(v.range.low) << "\n";
  out << "tube_high=" << format_double(v.range.high) << "\n";
  out << "unsafe_set=" << v.unsafe_description << "\n";
  out << "unsafe_time_bound="
      << (v.unsafe_time_bound ? format_double(*v.unsafe_time_bound) : "none") << "\n";
  out << "tau=" << (v.tau ? format_double(*v.tau) : "none") << "\n";
  if (const auto* b = std::get_if<PacBudget>(&v.budget)) {
    out << "epsilon=" << format_double(b->epsilon) << "\n";
    out << "beta=" << format_double(b->beta) << "\n";
  } else {
    const auto& b2 = std::get<TwoLevelBudget>(v.budget);
    out << "epsilon1=" << format_double(b2.epsilon1) << "\n";
    out << "beta1=" << format_double(b2.beta1) << "\n";
    out << "epsilon2=" << format_double(b2.epsilon2) << "\n";
    out << "beta2=" << format_double(b2.beta2) << "\n";
  }
  out << "decision_dims=" << decision_dims(v.budget) << "\n";
  if (!config_hash.empty()) out << "config_hash=" << config_hash << "\n";
}

}  // namespace pacmc
