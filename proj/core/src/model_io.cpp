#include "pacmc/model_io.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "pacmc/error.hpp"
#include "pacmc/sampling.hpp"

namespace pacmc {
namespace {

std::string join(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

const char* kind_name(ModelTemplate::Kind k) {
  switch (k) {
    case ModelTemplate::Kind::PolyTime:
      return "poly_time";
    case ModelTemplate::Kind::PolyInputTime:
      return "poly_input_time";
    case ModelTemplate::Kind::Frozen:
      return "frozen";
    case ModelTemplate::Kind::Custom:
      return "custom";
  }
  return "";
}

void write_polynomial(std::ostream& out, const std::string& prefix, const ModelTemplate& t) {
  out << prefix << "kind=" << kind_name(t.kind()) << "\n";
  out << prefix << "degree=" << t.degree() << "\n";
  out << prefix << "input_dimension=" << t.input_dimension() << "\n";
  out << prefix << "time_scale=" << format_double(t.time_scale()) << "\n";
}

struct Entry {
  std::string value;
  std::size_t line;
};

class Fields {
 public:
  explicit Fields(std::istream& in) {
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
      ++no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError(no, "expected key=value");
      std::string key = line.substr(0, eq);
      if (map_.count(key)) throw ParseError(no, "duplicate key '" + key + "'");
      map_[key] = {line.substr(eq + 1), no};
      last_line_ = no;
    }
  }

  bool has(const std::string& key) const { return map_.count(key) != 0; }

  const Entry& entry(const std::string& key) const {
    auto it = map_.find(key);
    if (it == map_.end()) throw ParseError(last_line_ + 1, "missing key '" + key + "'");
    used_[key] = true;
    return it->second;
  }

  std::string text(const std::string& key) const { return entry(key).value; }

  double real(const std::string& key) const {
    const Entry& e = entry(key);
    double v;
    if (!parse_double(e.value, v)) throw ParseError(e.line, "bad number for '" + key + "'");
    return v;
  }

  std::uint64_t count(const std::string& key) const {
    const Entry& e = entry(key);
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(e.value, &pos);
      if (pos != e.value.size() || e.value.front() == '-') throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ParseError(e.line, "bad integer for '" + key + "'");
    }
  }

  std::vector<double> reals(const std::string& key) const {
    const Entry& e = entry(key);
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v;
      if (!parse_double(cell, v)) throw ParseError(e.line, "bad number in '" + key + "'");
      out.push_back(v);
    }
    return out;
  }

  void check_all_used() const {
    for (const auto& [k, e] : map_) {
      if (!used_.count(k)) throw ParseError(e.line, "unknown key '" + k + "'");
    }
  }

 private:
  std::map<std::string, Entry> map_;
  mutable std::map<std::string, bool> used_;
  std::size_t last_line_ = 0;
};

ModelTemplate read_polynomial(const Fields& f, const std::string& prefix) {
  const std::string kind = f.text(prefix + "kind");
  const auto degree = static_cast<int>(f.count(prefix + "degree"));
  const auto n = f.count(prefix + "input_dimension");
  const double scale = f.real(prefix + "time_scale");
  const std::size_t line = f.entry(prefix + "kind").line;
  try {
    if (kind == "poly_time") return ModelTemplate::poly_time(degree, scale);
    if (kind == "poly_input_time") return ModelTemplate::poly_input_time(n, degree, scale);
  } catch (const ContractError& e) {
    throw ParseError(line, e.what());
  }
  throw ParseError(line, "unsupported template kind '" + kind + "'");
}

}  // namespace

void save_model(const LearnedModel& model, std::ostream& out) {
  const ModelTemplate& t = model.model_template;
  if (t.kind() == ModelTemplate::Kind::Custom ||
      (t.kind() == ModelTemplate::Kind::Frozen &&
       t.frozen_base()->kind() == ModelTemplate::Kind::Custom)) {
    throw ContractError("custom templates cannot be serialised");
  }
  out << "# pacmc learned model\n";
  out << "format=1\n";
  out << "template=" << t.description() << "\n";
  if (t.kind() == ModelTemplate::Kind::Frozen) {
    out << "template.kind=frozen\n";
    write_polynomial(out, "template.base.", *t.frozen_base());
    out << "template.base.coefficients=" << join(t.frozen_coefficients()) << "\n";
  } else {
    write_polynomial(out, "template.", t);
  }
  out << "coefficients=" << join(model.coefficients) << "\n";
  out << "xi=" << format_double(model.xi) << "\n";

  const Provenance& p = model.provenance;
  out << "provenance.time_samples=" << p.time_samples << "\n";
  out << "provenance.input_samples=" << p.input_samples << "\n";
  out << "provenance.u_c=" << format_double(p.u_c) << "\n";
  out << "provenance.u_xi=" << format_double(p.u_xi) << "\n";
  out << "provenance.seed=" << p.seed << "\n";
  out << "provenance.staged=" << (p.staged ? 1 : 0) << "\n";
  out << "provenance.pilot_time_samples=" << p.pilot_time_samples << "\n";
  out << "provenance.pilot_input_samples=" << p.pilot_input_samples << "\n";
  out << "provenance.input_set=" << p.input_set << "\n";
  out << "provenance.config_hash=" << p.config_hash << "\n";
  if (!p.budget) {
    out << "budget.kind=none\n";
  } else if (const auto* b = std::get_if<PacBudget>(&*p.budget)) {
    out << "budget.kind=single\n";
    out << "budget.epsilon=" << format_double(b->epsilon) << "\n";
    out << "budget.beta=" << format_double(b->beta) << "\n";
    out << "budget.decision_dims=" << b->decision_dims << "\n";
  } else {
    const auto& b2 = std::get<TwoLevelBudget>(*p.budget);
    out << "budget.kind=two_level\n";
    out << "budget.epsilon1=" << format_double(b2.epsilon1) << "\n";
    out << "budget.beta1=" << format_double(b2.beta1) << "\n";
    out << "budget.epsilon2=" << format_double(b2.epsilon2) << "\n";
    out << "budget.beta2=" << format_double(b2.beta2) << "\n";
    out << "budget.decision_dims=" << b2.decision_dims << "\n";
  }
}

void save_model(const LearnedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file " + path.string());
  save_model(model, out);
  if (!out) throw Error("failed writing model file " + path.string());
}

LearnedModel load_model(std::istream& in) {
  const Fields f(in);
  if (f.count("format") != 1) throw ParseError(f.entry("format").line, "unsupported format");
  f.text("template");  // informational

  ModelTemplate tmpl = ModelTemplate::poly_time(0);
  if (f.text("template.kind") == "frozen") {
    const ModelTemplate base = read_polynomial(f, "template.base.");
    const auto c = f.reals("template.base.coefficients");
    if (c.size() != base.size()) {
      throw ParseError(f.entry("template.base.coefficients").line,
                       "frozen coefficient count does not match base template");
    }
    tmpl = freeze(base, c);
  } else {
    tmpl = read_polynomial(f, "template.");
  }

  LearnedModel model{tmpl, f.reals("coefficients"), f.real("xi"), {}};
  if (model.coefficients.size() != tmpl.size()) {
    throw ParseError(f.entry("coefficients").line,
                     "expected " + std::to_string(tmpl.size()) + " coefficients, found " +
                         std::to_string(model.coefficients.size()));
  }
  Provenance& p = model.provenance;
  p.time_samples = f.count("provenance.time_samples");
  p.input_samples = f.count("provenance.input_samples");
  p.u_c = f.real("provenance.u_c");
  p.u_xi = f.real("provenance.u_xi");
  p.seed = f.count("provenance.seed");
  p.staged = f.count("provenance.staged") != 0;
  p.pilot_time_samples = f.count("provenance.pilot_time_samples");
  p.pilot_input_samples = f.count("provenance.pilot_input_samples");
  p.input_set = f.text("provenance.input_set");
  p.config_hash = f.text("provenance.config_hash");

  const std::string kind = f.text("budget.kind");
  if (kind == "single") {
    PacBudget b{f.real("budget.epsilon"), f.real("budget.beta"),
                f.count("budget.decision_dims")};
    p.budget = b;
  } else if (kind == "two_level") {
    TwoLevelBudget b{f.real("budget.epsilon1"), f.real("budget.beta1"),
                     f.real("budget.epsilon2"), f.real("budget.beta2"),
                     f.count("budget.decision_dims")};
    p.budget = b;
  } else if (kind != "none") {
    throw ParseError(f.entry("budget.kind").line, "unknown budget kind '" + kind + "'");
  }
  f.check_all_used();
  return model;
}

LearnedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read model file " + path.string());
  return load_model(in);
}

}  // namespace pacmc
