#include "pacmc/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pacmc/error.hpp"
#include "pacmc/parallel.hpp"

namespace pacmc {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double number_or_throw(std::string_view text, std::string_view what) {
  double v = 0.0;
  if (!parse_double(trim(text), v)) {
    throw ConfigError("cannot parse number '" + std::string(text) + "' in " +
                      std::string(what));
  }
  return v;
}

}  // namespace

// Shortest text that parses back to the same double.
std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

InputSet InputSet::box(std::vector<double> lower, std::vector<double> upper) {
  if (lower.empty() || lower.size() != upper.size()) {
    throw ContractError("box bounds must be nonempty and of equal dimension");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || lower[i] > upper[i]) {
      throw ContractError("box axis " + std::to_string(i) + " has invalid bounds");
    }
  }
  InputSet s;
  s.shape_ = Shape::Box;
  s.center_.resize(lower.size());
  for (std::size_t i = 0; i < lower.size(); ++i) s.center_[i] = 0.5 * (lower[i] + upper[i]);
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

InputSet InputSet::point(std::vector<double> p) {
  auto copy = p;
  return box(std::move(copy), std::move(p));
}

InputSet InputSet::ball(std::vector<double> center, double radius) {
  if (center.empty()) throw ContractError("ball center must be nonempty");
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw ContractError("ball radius must be finite and nonnegative");
  }
  InputSet s;
  s.shape_ = Shape::Ball;
  s.radius_ = radius;
  s.lower_.resize(center.size());
  s.upper_.resize(center.size());
  for (std::size_t i = 0; i < center.size(); ++i) {
    s.lower_[i] = center[i] - radius;
    s.upper_[i] = center[i] + radius;
  }
  s.center_ = std::move(center);
  return s;
}

InputSet InputSet::parse(std::string_view text) {
  text = trim(text);
  const auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') {
    throw ConfigError("malformed input set '" + std::string(text) + "'");
  }
  const std::string_view kind = trim(text.substr(0, open));
  const std::string_view body = text.substr(open + 1, text.size() - open - 2);

  if (kind == "box") {
    std::vector<double> lo, hi;
    for (auto axis : split(body, ',')) {
      const auto parts = split(axis, ':');
      if (parts.size() != 2) throw ConfigError("box axis must be 'lo:hi', got '" +
                                               std::string(trim(axis)) + "'");
      lo.push_back(number_or_throw(parts[0], "box"));
      hi.push_back(number_or_throw(parts[1], "box"));
    }
    try {
      return box(std::move(lo), std::move(hi));
    } catch (const ContractError& e) {
      throw ConfigError(e.what());
    }
  }
  if (kind == "point") {
    std::vector<double> p;
    for (auto v : split(body, ',')) p.push_back(number_or_throw(v, "point"));
    return point(std::move(p));
  }
  if (kind == "ball") {
    const auto semi = body.find(';');
    if (semi == std::string_view::npos) throw ConfigError("ball needs '; r=<radius>'");
    std::vector<double> c;
    for (auto v : split(body.substr(0, semi), ',')) c.push_back(number_or_throw(v, "ball"));
    auto rpart = trim(body.substr(semi + 1));
    if (rpart.starts_with("r=")) rpart.remove_prefix(2);
    const double r = number_or_throw(rpart, "ball radius");
    try {
      return ball(std::move(c), r);
    } catch (const ContractError& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("unknown input set kind '" + std::string(kind) + "'");
}

bool InputSet::contains(std::span<const double> x, double tol) const {
  if (x.size() != dimension()) return false;
  if (shape_ == Shape::Box) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
    }
    return true;
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - center_[i]) * (x[i] - center_[i]);
  return d2 <= (radius_ + tol) * (radius_ + tol);
}

bool InputSet::is_point() const {
  if (shape_ == Shape::Ball) return radius_ == 0.0;
  return lower_ == upper_;
}

std::vector<double> InputSet::sample(RandomStream& rng) const {
  std::vector<double> x(dimension());
  if (shape_ == Shape::Box) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(lower_[i], upper_[i]);
    return x;
  }
  if (radius_ == 0.0) return center_;
  const double r2 = radius_ * radius_;
  for (;;) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = rng.uniform(lower_[i], upper_[i]);
      d2 += (x[i] - center_[i]) * (x[i] - center_[i]);
    }
    if (d2 <= r2) return x;
  }
}

std::string InputSet::describe() const {
  std::string out;
  if (shape_ == Shape::Ball) {
    out = "ball(";
    for (std::size_t i = 0; i < center_.size(); ++i) {
      if (i) out += ", ";
      out += format_double(center_[i]);
    }
    return out + "; r=" + format_double(radius_) + ")";
  }
  if (is_point()) {
    out = "point(";
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      if (i) out += ", ";
      out += format_double(lower_[i]);
    }
    return out + ")";
  }
  out = "box(";
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (i) out += ", ";
    out += format_double(lower_[i]) + ":" + format_double(upper_[i]);
  }
  return out + ")";
}

std::vector<double> sample_times(double horizon, std::size_t count, RandomStream& rng) {
  if (count == 0) throw ContractError("time sample count must be >= 1");
  if (!(horizon > 0.0)) throw ContractError("horizon must be positive");
  std::vector<double> t(count);
  for (auto& v : t) v = rng.uniform(0.0, horizon);
  return t;
}

std::vector<double> sample_times(double horizon, std::size_t count, std::uint64_t seed) {
  RandomStream rng(seed, "times");
  return sample_times(horizon, count, rng);
}

std::vector<std::vector<double>> sample_inputs(const InputSet& set, std::size_t count,
                                               RandomStream& rng) {
  if (count == 0) throw ContractError("input sample count must be >= 1");
  std::vector<std::vector<double>> xs;
  xs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) xs.push_back(set.sample(rng));
  return xs;
}

std::vector<std::vector<double>> sample_inputs(const InputSet& set, std::size_t count,
                                               std::uint64_t seed) {
  RandomStream rng(seed, "inputs");
  return sample_inputs(set, count, rng);
}

Dataset collect_dataset(const TrajectoryOracle& oracle,
                        const std::vector<std::vector<double>>& inputs,
                        const std::vector<double>& times) {
  if (inputs.empty() || times.empty()) {
    throw ContractError("collect_dataset needs at least one input and one time");
  }
  const double horizon = oracle.horizon();
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (!(times[j] >= 0.0 && times[j] <= horizon)) {
      throw OutOfHorizon("time index " + std::to_string(j) + " (" + format_double(times[j]) +
                         ") outside [0, " + format_double(horizon) + "]");
    }
  }
  Dataset ds;
  ds.inputs = inputs;
  ds.times = times;
  ds.horizon = horizon;
  ds.values.resize(inputs.size() * times.size());

  parallel_for(inputs.size(), [&](std::size_t i) {
    std::vector<double> row;
    try {
      row = oracle.evaluate_many(inputs[i], times);
    } catch (const Error& e) {
      // Locate the first failing time for the error context.
      std::size_t j = 0;
      for (; j < times.size(); ++j) {
        try {
          (void)oracle.evaluate(inputs[i], times[j]);
        } catch (const Error&) {
          break;
        }
      }
      throw Error("oracle failed at (i=" + std::to_string(i) + ", j=" +
                  std::to_string(std::min(j, times.size() - 1)) + "): " + e.what());
    }
    if (row.size() != times.size()) {
      throw Error("oracle returned " + std::to_string(row.size()) + " values for input " +
                  std::to_string(i) + ", expected " + std::to_string(times.size()));
    }
    std::copy(row.begin(), row.end(), ds.values.begin() + i * times.size());
  });
  return ds;
}

void write_dataset(const Dataset& ds, std::ostream& out) {
  const std::size_t n = ds.input_dimension();
  out << "# pacmc dataset\n";
  out << "# horizon=" << format_double(ds.horizon) << "\n";
  out << "# seed=" << ds.seed << "\n";
  if (!ds.set_description.empty()) out << "# input_set=" << ds.set_description << "\n";
  out << "# inputs=" << ds.input_count() << " times=" << ds.time_count() << "\n";
  for (std::size_t d = 0; d < n; ++d) out << "x0_" << (d + 1) << ",";
  out << "t,y\n";
  for (std::size_t i = 0; i < ds.input_count(); ++i) {
    std::string prefix;
    for (double v : ds.inputs[i]) prefix += format_double(v) + ",";
    for (std::size_t j = 0; j < ds.time_count(); ++j) {
      out << prefix << format_double(ds.times[j]) << "," << format_double(ds.value(i, j))
          << "\n";
    }
  }
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_dataset(ds, out);
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

Dataset read_dataset(std::istream& in) {
  struct Row {
    std::vector<double> x;
    double t;
    double y;
    std::size_t line;
  };
  Dataset ds;
  bool have_header = false;
  bool have_horizon = false;
  std::size_t declared_times = 0;
  std::size_t n = 0;
  std::size_t line_no = 0;
  std::string line;
  std::vector<Row> rows;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      const auto body = trim(view.substr(1));
      if (body.starts_with("horizon=")) {
        if (!parse_double(body.substr(8), ds.horizon)) {
          throw ParseError(line_no, "bad horizon metadata");
        }
        have_horizon = true;
      } else if (body.starts_with("seed=")) {
        try {
          ds.seed = std::stoull(std::string(body.substr(5)));
        } catch (const std::exception&) {
          throw ParseError(line_no, "bad seed metadata");
        }
      } else if (body.starts_with("input_set=")) {
        ds.set_description = std::string(body.substr(10));
      } else if (body.starts_with("inputs=")) {
        const auto pos = body.find("times=");
        if (pos == std::string_view::npos) throw ParseError(line_no, "bad size metadata");
        try {
          declared_times = std::stoull(std::string(body.substr(pos + 6)));
        } catch (const std::exception&) {
          throw ParseError(line_no, "bad size metadata");
        }
      }
      continue;
    }
    const auto cells = split(view, ',');
    if (!cells.empty() && trim(cells.front()).starts_with("x0_")) {
      if (have_header) throw ParseError(line_no, "duplicate header");
      if (cells.size() < 3 || trim(cells[cells.size() - 2]) != "t" ||
          trim(cells.back()) != "y") {
        throw ParseError(line_no, "header must be x0_1,...,x0_n,t,y");
      }
      n = cells.size() - 2;
      for (std::size_t d = 0; d < n; ++d) {
        if (trim(cells[d]) != "x0_" + std::to_string(d + 1)) {
          throw ParseError(line_no, "header column " + std::to_string(d + 1) +
                                        " must be x0_" + std::to_string(d + 1));
        }
      }
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(line_no, "data row before header");
    if (cells.size() != n + 2) {
      throw ParseError(line_no, "row has " + std::to_string(cells.size()) + " cells, expected " +
                                    std::to_string(n + 2) + " (input dimension " +
                                    std::to_string(n) + ")");
    }
    Row row{std::vector<double>(n), 0.0, 0.0, line_no};
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (trim(cells[c]).empty()) throw ParseError(line_no, "empty cell");
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        throw ParseError(line_no, "cannot parse number '" + std::string(trim(cells[c])) + "'");
      }
      if (c < n) {
        row.x[c] = v;
      } else if (c == n) {
        row.t = v;
      } else {
        row.y = v;
      }
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError(line_no, "missing header");
  if (rows.empty()) throw ParseError(line_no, "no data rows");

  // Block length: declared grid size, else the run length of the first input.
  std::size_t m = declared_times;
  if (m == 0) {
    m = 1;
    while (m < rows.size() && rows[m].x == rows[0].x) ++m;
  }
  if (rows.size() % m != 0) {
    throw ParseError(rows.back().line, std::to_string(rows.size()) +
                                           " rows do not form a grid of " + std::to_string(m) +
                                           " times per input");
  }
  for (std::size_t j = 0; j < m; ++j) ds.times.push_back(rows[j].t);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t j = r % m;
    if (j == 0) {
      ds.inputs.push_back(rows[r].x);
    } else if (rows[r].x != ds.inputs.back()) {
      throw ParseError(rows[r].line, "input changes inside a block of " + std::to_string(m) +
                                         " times");
    }
    if (rows[r].t != ds.times[j]) {
      throw ParseError(rows[r].line, "time grid of input " +
                                         std::to_string(ds.inputs.size() - 1) +
                                         " differs from the first input's grid");
    }
    ds.values.push_back(rows[r].y);
  }
  if (!have_horizon) ds.horizon = *std::max_element(ds.times.begin(), ds.times.end());
  for (std::size_t j = 0; j < m; ++j) {
    if (!(ds.times[j] >= 0.0 && ds.times[j] <= ds.horizon)) {
      throw ParseError(rows[j].line, "time " + format_double(ds.times[j]) +
                                         " outside [0, horizon]");
    }
  }
  return ds;
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset '" + path.string() + "'");
  return read_dataset(in);
}

}  // namespace pacmc
