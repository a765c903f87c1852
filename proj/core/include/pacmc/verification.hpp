#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pacmc/pac_bounds.hpp"
#include "pacmc/sampling.hpp"
#include "pacmc/templates.hpp"

namespace pacmc {

// Finite union of closed, possibly half-infinite intervals of output values.
class UnsafeSet {
 public:
  UnsafeSet() = default;
  // Normalises: drops empty pieces, sorts, merges overlaps.
  explicit UnsafeSet(std::vector<Interval> pieces);

  static UnsafeSet at_least(double u) { return UnsafeSet(std::vector<Interval>{{u, kInfinity}}); }
  static UnsafeSet at_most(double u) { return UnsafeSet(std::vector<Interval>{{-kInfinity, u}}); }

  // ';'-separated pieces: "y>=3", "y<=-1", "[a,b]"; "none" or "" is empty.
  static UnsafeSet parse(std::string_view text);

  bool empty() const { return pieces_.empty(); }
  const std::vector<Interval>& pieces() const { return pieces_; }
  bool intersects(double lo, double hi) const;
  bool contains(double y) const { return intersects(y, y); }
  std::string describe() const;

  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

 private:
  std::vector<Interval> pieces_;
};

enum class Rigor { Certified, GridApproximate };
enum class Scope { OneTrajectory, ListedInputs, AllInputs };

struct VerificationScope {
  Scope kind = Scope::OneTrajectory;
  std::vector<std::vector<double>> inputs;  // one or listed
  std::optional<InputSet> set;              // all

  static VerificationScope one(std::vector<double> x0);
  static VerificationScope listed(std::vector<std::vector<double>> inputs);
  static VerificationScope all(InputSet set);
  std::string describe() const;
};

struct RangeSettings {
  double time_tol = 1e-9;      // root isolation, time units
  double gap_tol = 1e-3;       // branch-and-bound stopping gap
  int max_depth = 20;          // per-box subdivision depth
  std::size_t max_boxes = 1'000'000;
  std::size_t grid_times = 100'000;
  std::size_t grid_inputs = 1'000;
};

struct TubeRange {
  double low = 0.0;   // lower bound of z - xi over the scope
  double high = 0.0;  // upper bound of z + xi
  Rigor rigor = Rigor::Certified;
  std::string domain;
};

// Enclosure of the tube over scope x [0, T]. Input-independent polynomial
// templates and single inputs use univariate root isolation; input-dependent
// polynomials over a set use interval branch-and-bound on its bounding box;
// anything else is evaluated on a grid and tagged GridApproximate.
TubeRange tube_range(const LearnedModel& model, const VerificationScope& scope, double horizon,
                     const RangeSettings& settings = {});

struct UnsafeTime {
  double tau = 0.0;    // over-approximates the time the tube meets Uns
  double bound = 0.0;  // epsilon * T + tau
  Rigor rigor = Rigor::Certified;
};

// Input-independent (or single-input) polynomial models are certified. For
// other models tau is the largest value over a grid of inputs and times.
UnsafeTime unsafe_time_budget(const LearnedModel& model, const UnsafeSet& uns,
                              const VerificationScope& scope, double horizon, double epsilon,
                              const RangeSettings& settings = {});

enum class VerdictKind { SafeWithBudget, BudgetedWithTau, Inconclusive };

struct Verdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  std::optional<double> unsafe_time_bound;
  std::optional<double> tau;
  Budget budget;
  Scope scope = Scope::OneTrajectory;
  Rigor rigor = Rigor::Certified;
  TubeRange range;
  double horizon = 0.0;
  double xi = 0.0;
  std::string unsafe_description;
  std::string scope_description;

  std::string text() const;
};

// One-trajectory and listed scopes need a PacBudget, the all-inputs scope a
// TwoLevelBudget. A budget stored in the model's provenance must match.
// Throws ContractError on mismatch.
Verdict check_safety(const LearnedModel& model, const UnsafeSet& uns,
                     const VerificationScope& scope, const Budget& budget, double horizon,
                     const RangeSettings& settings = {});

const char* to_string(VerdictKind k);
const char* to_string(Rigor r);
const char* to_string(Scope s);

// Prose statement followed by a key=value block.
void write_verdict(const Verdict& v, std::ostream& out, std::string_view config_hash = "");

}  // namespace pacmc
