#include "pacmc/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pacmc/error.hpp"
#include "pacmc/model_io.hpp"
#include "pacmc/oracle.hpp"
#include "pacmc/rng.hpp"
#include "pacmc/scenario.hpp"

namespace pacmc {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"system", {"name", "horizon", "step", "l", "dataset"}},
      {"sampling", {"input_set", "inputs", "seed", "time_samples", "input_samples"}},
      {"template", {"spec", "time_scale"}},
      {"budget", {"epsilon", "beta", "epsilon1", "beta1", "epsilon2", "beta2"}},
      {"staged", {"pilot_time_samples", "pilot_input_samples"}},
      {"scenario_lp", {"u_c", "u_xi"}},
      {"verification", {"unsafe", "scope"}},
      {"montecarlo",
       {"count", "delta_t", "threshold", "seed", "plot_points", "plot_trajectories"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> text(const std::string& key) const {
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  std::optional<double> real(const std::string& key) const {
    auto t = text(key);
    if (!t) return std::nullopt;
    double v;
    if (!parse_double(*t, v)) throw ConfigError(key + ": '" + *t + "' is not a number");
    return v;
  }

  std::optional<std::uint64_t> count(const std::string& key) const {
    auto t = text(key);
    if (!t) return std::nullopt;
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(*t, &pos);
      if (pos != t->size() || t->front() == '-') throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(key + ": '" + *t + "' is not a non-negative integer");
    }
  }

 private:
  const pt::ptree& tree_;
};

std::vector<std::vector<double>> parse_inputs(const std::string& text) {
  std::vector<std::vector<double>> out;
  std::stringstream ss(text);
  std::string point;
  while (std::getline(ss, point, ';')) {
    std::vector<double> x;
    std::stringstream ps(point);
    std::string cell;
    while (std::getline(ps, cell, ',')) {
      double v;
      if (!parse_double(trim(cell), v)) {
        throw ConfigError("sampling.inputs: bad number '" + trim(cell) + "'");
      }
      x.push_back(v);
    }
    if (x.empty()) throw ConfigError("sampling.inputs: empty point");
    if (!out.empty() && x.size() != out.front().size()) {
      throw ConfigError("sampling.inputs: points have different dimensions");
    }
    out.push_back(std::move(x));
  }
  return out;
}

Scope parse_scope(const std::string& s) {
  if (s == "one" || s == "one-trajectory") return Scope::OneTrajectory;
  if (s == "listed" || s == "listed-inputs") return Scope::ListedInputs;
  if (s == "all" || s == "all-inputs") return Scope::AllInputs;
  throw ConfigError("verification.scope: expected one, listed or all, got '" + s + "'");
}

// key=value argument inside "name(key=value)".
int degree_argument(const std::string& spec, const std::string& body) {
  const auto eq = body.find('=');
  if (eq == std::string::npos || trim(body.substr(0, eq)) != "degree") {
    throw ConfigError("template.spec: expected 'degree=<d>' in '" + spec + "'");
  }
  const std::string v = trim(body.substr(eq + 1));
  try {
    std::size_t pos = 0;
    const int d = std::stoi(v, &pos);
    if (pos != v.size() || d < 0) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("template.spec: bad degree '" + v + "'");
  }
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

ModelTemplate parse_template_spec(const std::string& spec_in, std::size_t input_dimension,
                                  double time_scale, const std::filesystem::path& base_dir) {
  const std::string spec = trim(spec_in);
  const auto open = spec.find('(');
  if (open == std::string::npos || spec.back() != ')') {
    throw ConfigError("template.spec: cannot parse '" + spec + "'");
  }
  const std::string name = trim(spec.substr(0, open));
  const std::string body = trim(spec.substr(open + 1, spec.size() - open - 2));
  if (name == "poly_time") return ModelTemplate::poly_time(degree_argument(spec, body), time_scale);
  if (name == "poly_input_time") {
    if (input_dimension == 0) throw ConfigError("template.spec: input dimension unknown");
    return ModelTemplate::poly_input_time(input_dimension, degree_argument(spec, body),
                                          time_scale);
  }
  if (name == "frozen") {
    std::filesystem::path p(body);
    if (p.is_relative()) p = base_dir / p;
    try {
      const LearnedModel m = load_model(p);
      return freeze(m.model_template, m.coefficients);
    } catch (const ParseError& e) {
      throw ConfigError("template.spec: " + p.string() + ": " + e.what());
    } catch (const Error& e) {
      throw ConfigError("template.spec: " + std::string(e.what()));
    }
  }
  throw ConfigError("template.spec: unknown template '" + name + "'");
}

double ExperimentConfig::effective_horizon() const {
  if (horizon > 0) return horizon;
  if (!has_oracle()) throw ConfigError("system.horizon is required for external datasets");
  BenchmarkParams p;
  p.l = l;
  return benchmark_system(system, p).default_horizon;
}

std::size_t ExperimentConfig::input_dimension() const {
  if (input_set) return input_set->dimension();
  if (!listed_inputs.empty()) return listed_inputs.front().size();
  return 0;
}

ModelTemplate ExperimentConfig::model_template() const {
  try {
    return parse_template_spec(template_spec, input_dimension(), effective_time_scale(),
                               base_dir);
  } catch (const ContractError& e) {
    throw ConfigError("template.spec: " + std::string(e.what()));
  }
}

Budget ExperimentConfig::budget() const {
  const std::size_t dims = staged() ? 1 : model_template().decision_dims();
  if (two_level) {
    TwoLevelBudget b = *two_level;
    b.decision_dims = dims;
    return b;
  }
  PacBudget b = *single;
  b.decision_dims = dims;
  return b;
}

SampleSizes ExperimentConfig::sample_sizes() const {
  SampleSizes s = required_samples(budget());
  if (!two_level) s.inputs = listed_inputs.empty() ? 1 : listed_inputs.size();
  if (time_samples) s.times = time_samples;
  if (input_samples) s.inputs = input_samples;
  return s;
}

Scope ExperimentConfig::effective_scope() const {
  if (scope) return *scope;
  if (two_level) return Scope::AllInputs;
  return listed_inputs.size() > 1 ? Scope::ListedInputs : Scope::OneTrajectory;
}

VerificationScope ExperimentConfig::verification_scope() const {
  switch (effective_scope()) {
    case Scope::AllInputs:
      if (!input_set) throw ConfigError("all-inputs scope needs sampling.input_set");
      return VerificationScope::all(*input_set);
    case Scope::ListedInputs:
      if (listed_inputs.empty()) throw ConfigError("listed scope needs sampling.inputs");
      return VerificationScope::listed(listed_inputs);
    case Scope::OneTrajectory:
      break;
  }
  if (listed_inputs.size() == 1) return VerificationScope::one(listed_inputs.front());
  if (input_set && input_set->is_point()) return VerificationScope::one(input_set->lower());
  if (!input_set && listed_inputs.empty()) return VerificationScope::one({});
  throw ConfigError("one-trajectory scope needs a point input set or a single listed input");
}

double ExperimentConfig::epsilon() const {
  return two_level ? two_level->epsilon1 : single->epsilon;
}

std::string ExperimentConfig::effective_text() const {
  std::ostringstream os;
  auto num = [](double v) { return format_double(v); };
  os << "[system]\n";
  os << "name = " << system << "\n";
  if (!has_oracle()) os << "dataset = " << dataset.string() << "\n";
  os << "horizon = " << num(effective_horizon()) << "\n";
  if (has_oracle()) {
    os << "step = " << num(step) << "\n";
    if (system == "scalable") os << "l = " << l << "\n";
  }
  os << "\n[sampling]\n";
  if (input_set) os << "input_set = " << input_set->describe() << "\n";
  if (!listed_inputs.empty()) {
    os << "inputs = ";
    for (std::size_t i = 0; i < listed_inputs.size(); ++i) {
      if (i) os << "; ";
      for (std::size_t d = 0; d < listed_inputs[i].size(); ++d) {
        if (d) os << ", ";
        os << num(listed_inputs[i][d]);
      }
    }
    os << "\n";
  }
  os << "seed = " << seed << "\n";
  const SampleSizes sizes = sample_sizes();
  os << "time_samples = " << sizes.times << "\n";
  os << "input_samples = " << sizes.inputs << "\n";
  os << "\n[template]\n";
  os << "spec = " << template_spec << "\n";
  os << "time_scale = " << num(effective_time_scale()) << "\n";
  os << "\n[budget]\n";
  if (two_level) {
    os << "epsilon1 = " << num(two_level->epsilon1) << "\n";
    os << "beta1 = " << num(two_level->beta1) << "\n";
    os << "epsilon2 = " << num(two_level->epsilon2) << "\n";
    os << "beta2 = " << num(two_level->beta2) << "\n";
  } else {
    os << "epsilon = " << num(single->epsilon) << "\n";
    os << "beta = " << num(single->beta) << "\n";
  }
  if (pilot) {
    os << "\n[staged]\n";
    os << "pilot_time_samples = " << pilot->times << "\n";
    os << "pilot_input_samples = " << pilot->inputs << "\n";
  }
  os << "\n[scenario_lp]\n";
  os << "u_c = " << num(u_c) << "\n";
  os << "u_xi = " << num(u_xi) << "\n";
  os << "\n[verification]\n";
  os << "unsafe = " << unsafe.describe() << "\n";
  os << "scope = " << to_string(effective_scope()) << "\n";
  os << "\n[montecarlo]\n";
  os << "count = " << mc_count << "\n";
  os << "delta_t = " << num(mc_delta_t) << "\n";
  os << "threshold = " << num(mc_threshold_value()) << "\n";
  os << "seed = " << mc_seed_value() << "\n";
  os << "plot_points = " << plot_points << "\n";
  os << "plot_trajectories = " << plot_trajectories << "\n";
  return os.str();
}

std::string ExperimentConfig::hash() const { return hex64(fnv1a64(effective_text())); }

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    auto it = schema().find(section);
    if (it == schema().end()) throw ConfigError("unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
    }
  }

  const Reader r(tree);
  ExperimentConfig c;
  c.base_dir = base_dir;

  if (auto v = r.text("system.name")) c.system = *v;
  if (auto v = r.real("system.horizon")) c.horizon = *v;
  if (auto v = r.real("system.step")) c.step = *v;
  if (auto v = r.count("system.l")) c.l = static_cast<int>(*v);
  if (auto v = r.text("system.dataset")) {
    c.dataset = *v;
    if (c.dataset.is_relative()) c.dataset = base_dir / c.dataset;
  }
  if (c.has_oracle()) {
    BenchmarkParams p;
    p.l = c.l;
    benchmark_system(c.system, p);  // validates the name
    if (!(c.step > 0)) throw ConfigError("system.step must be positive");
  } else if (c.dataset.empty()) {
    throw ConfigError("system.dataset is required when system.name = dataset");
  }
  if (c.horizon < 0) throw ConfigError("system.horizon must be positive");

  if (auto v = r.text("sampling.input_set")) c.input_set = InputSet::parse(*v);
  if (auto v = r.text("sampling.inputs")) c.listed_inputs = parse_inputs(*v);
  if (c.input_set && !c.listed_inputs.empty()) {
    throw ConfigError("sampling.input_set and sampling.inputs are mutually exclusive");
  }
  if (c.has_oracle() && !c.input_set && c.listed_inputs.empty()) {
    throw ConfigError("sampling.input_set or sampling.inputs is required");
  }
  if (c.has_oracle()) {
    BenchmarkParams p;
    p.l = c.l;
    const std::size_t dim = benchmark_system(c.system, p).state_dimension;
    if (c.input_dimension() != dim) {
      throw ConfigError("inputs have dimension " + std::to_string(c.input_dimension()) +
                        ", system " + c.system + " has " + std::to_string(dim));
    }
  }
  if (auto v = r.count("sampling.seed")) c.seed = *v;
  if (auto v = r.count("sampling.time_samples")) c.time_samples = *v;
  if (auto v = r.count("sampling.input_samples")) c.input_samples = *v;

  if (auto v = r.text("template.spec")) c.template_spec = *v;
  if (auto v = r.real("template.time_scale")) {
    if (!(*v > 0)) throw ConfigError("template.time_scale must be positive");
    c.time_scale = *v;
  }

  const bool has_single = r.text("budget.epsilon") || r.text("budget.beta");
  const bool has_two = r.text("budget.epsilon1") || r.text("budget.beta1") ||
                       r.text("budget.epsilon2") || r.text("budget.beta2");
  if (has_single == has_two) {
    throw ConfigError("[budget] needs either epsilon/beta or epsilon1/beta1/epsilon2/beta2");
  }
  auto need = [&](const char* key) {
    auto v = r.real(key);
    if (!v) throw ConfigError(std::string("missing ") + key);
    return *v;
  };
  try {
    if (has_single) {
      c.single = PacBudget{need("budget.epsilon"), need("budget.beta"), 1};
      c.single->validate();
    } else {
      c.two_level = TwoLevelBudget{need("budget.epsilon1"), need("budget.beta1"),
                                   need("budget.epsilon2"), need("budget.beta2"), 1};
      c.two_level->validate();
    }
  } catch (const ContractError& e) {
    throw ConfigError(std::string("[budget]: ") + e.what());
  }

  const auto pm = r.count("staged.pilot_time_samples");
  const auto pn = r.count("staged.pilot_input_samples");
  if (pm || pn) {
    if (!pm || !pn || *pm == 0 || *pn == 0) {
      throw ConfigError("[staged] needs positive pilot_time_samples and pilot_input_samples");
    }
    c.pilot = SampleSizes{*pm, *pn};
  }

  if (auto v = r.real("scenario_lp.u_c")) c.u_c = *v;
  if (auto v = r.real("scenario_lp.u_xi")) c.u_xi = *v;
  if (!(c.u_c > 0) || !(c.u_xi > 0)) throw ConfigError("scenario_lp bounds must be positive");

  if (auto v = r.text("verification.unsafe")) c.unsafe = UnsafeSet::parse(*v);
  if (auto v = r.text("verification.scope")) c.scope = parse_scope(*v);

  if (auto v = r.count("montecarlo.count")) c.mc_count = *v;
  if (auto v = r.real("montecarlo.delta_t")) c.mc_delta_t = *v;
  if (auto v = r.real("montecarlo.threshold")) c.mc_threshold = *v;
  if (auto v = r.count("montecarlo.seed")) c.mc_seed = *v;
  if (auto v = r.count("montecarlo.plot_points")) c.plot_points = *v;
  if (auto v = r.count("montecarlo.plot_trajectories")) c.plot_trajectories = *v;
  if (c.mc_count < 1) throw ConfigError("montecarlo.count must be >= 1");
  if (!(c.mc_delta_t > 0)) throw ConfigError("montecarlo.delta_t must be positive");
  if (c.mc_threshold && !(*c.mc_threshold >= 0 && *c.mc_threshold <= 1)) {
    throw ConfigError("montecarlo.threshold must lie in [0, 1]");
  }

  // Surface template and scope problems now rather than mid-pipeline.
  c.model_template();
  if (c.two_level && c.effective_scope() != Scope::AllInputs) {
    throw ConfigError("two-level budgets certify the all-inputs scope only");
  }
  if (!c.two_level && c.effective_scope() == Scope::AllInputs) {
    throw ConfigError("the all-inputs scope needs epsilon1/beta1/epsilon2/beta2");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_config(in, path.parent_path());
}

}  // namespace pacmc
