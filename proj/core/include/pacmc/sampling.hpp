#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pacmc/oracle.hpp"
#include "pacmc/rng.hpp"

namespace pacmc {

// Compact input set: an axis-aligned box (a point is a zero-width box) or a
// Euclidean ball.
class InputSet {
 public:
  enum class Shape { Box, Ball };

  static InputSet box(std::vector<double> lower, std::vector<double> upper);
  static InputSet point(std::vector<double> p);
  static InputSet ball(std::vector<double> center, double radius);

  // Accepts the forms produced by describe():
  //   box(1.25:1.55, 2.28:2.32)   point(1.4, 2.3)   ball(-5, -5; r=1)
  static InputSet parse(std::string_view text);

  Shape shape() const { return shape_; }
  std::size_t dimension() const { return lower_.size(); }
  bool contains(std::span<const double> x, double tol = 0.0) const;
  bool is_point() const;

  // Box: the box itself. Ball: its axis-aligned bounding box.
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<double>& center() const { return center_; }
  double radius() const { return radius_; }

  // One uniform draw. Ball draws use rejection from the bounding box.
  std::vector<double> sample(RandomStream& rng) const;

  std::string describe() const;

 private:
  InputSet() = default;

  Shape shape_ = Shape::Box;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> center_;
  double radius_ = 0.0;
};

// Grid of observations y_ij = b(x0_i, t_j) over a shared time grid.
struct Dataset {
  std::vector<std::vector<double>> inputs;
  std::vector<double> times;
  std::vector<double> values;  // inputs.size() x times.size(), row-major
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::string set_description;

  std::size_t input_count() const { return inputs.size(); }
  std::size_t time_count() const { return times.size(); }
  std::size_t input_dimension() const { return inputs.empty() ? 0 : inputs.front().size(); }
  double value(std::size_t i, std::size_t j) const { return values[i * times.size() + j]; }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// M i.i.d. uniform draws on [0, T] from stream "times" of `seed`, in draw order.
std::vector<double> sample_times(double horizon, std::size_t count, std::uint64_t seed);
// N i.i.d. uniform draws on `set` from stream "inputs" of `seed`.
std::vector<std::vector<double>> sample_inputs(const InputSet& set, std::size_t count,
                                               std::uint64_t seed);

// Stream-explicit variants used when several datasets share a master seed.
std::vector<double> sample_times(double horizon, std::size_t count, RandomStream& rng);
std::vector<std::vector<double>> sample_inputs(const InputSet& set, std::size_t count,
                                               RandomStream& rng);

// Runs the oracle for every input (concurrently across inputs) and records
// y at every time. The result does not depend on the worker count.
Dataset collect_dataset(const TrajectoryOracle& oracle,
                        const std::vector<std::vector<double>>& inputs,
                        const std::vector<double>& times);

// CSV with '#' metadata lines, header x0_1,...,x0_n,t,y and one row per
// triple in input-major order. Numbers round-trip exactly.
void write_dataset(const Dataset& ds, const std::filesystem::path& path);
void write_dataset(const Dataset& ds, std::ostream& out);
Dataset read_dataset(const std::filesystem::path& path);
Dataset read_dataset(std::istream& in);

// Shortest round-trip rendering shared by every text artifact.
std::string format_double(double v);
// Strict decimal parse (whole string must be consumed); nullopt-like failure
// is reported by returning false.
bool parse_double(std::string_view text, double& out);

}  // namespace pacmc
