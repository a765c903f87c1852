#include "pacmc/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <vector>

#include "pacmc/error.hpp"
#include "pacmc/model_io.hpp"
#include "pacmc/scenario.hpp"

namespace pacmc {
namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

struct Manifest {
  std::string hash;
  std::vector<std::pair<std::string, std::string>> stages;
  std::vector<std::string> files;

  void write(const fs::path& path, const std::string& state) const {
    std::ofstream out(path);
    out << "# pacmc run manifest\n";
    out << "config_hash=" << hash << "\n";
    out << "state=" << state << "\n";
    for (const auto& [stage, status] : stages) out << "stage." << stage << "=" << status << "\n";
    for (const auto& f : files) out << "artifact=" << f << "\n";
  }
};

}  // namespace

int exit_code_for(const std::exception& e, const std::string& stage) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e)) {
    return kExitConfig;
  }
  if (dynamic_cast<const InsufficientSamples*>(&e)) return kExitInsufficientSamples;
  if (dynamic_cast<const SolverStall*>(&e) || dynamic_cast<const BoundInfeasible*>(&e)) {
    return kExitSolver;
  }
  if (stage == "verify") return kExitVerdict;
  return kExitOther;
}

fs::path pilot_path(const fs::path& dataset_path) {
  fs::path p = dataset_path;
  p.replace_extension();
  return p.string() + ".pilot" + dataset_path.extension().string();
}

std::shared_ptr<SimulatedOracle> make_oracle(const ExperimentConfig& cfg) {
  if (!cfg.has_oracle()) throw ConfigError("system.name = dataset has no simulator");
  BenchmarkParams p;
  p.horizon = cfg.effective_horizon();
  p.step = cfg.step;
  p.l = cfg.l;
  return make_benchmark(cfg.system, p);
}

SampledData sample_stage(const ExperimentConfig& cfg) {
  const auto oracle = make_oracle(cfg);
  const SampleSizes sizes = cfg.sample_sizes();
  SampledData out;
  auto draw = [&](SampleSizes s, std::string_view prefix) {
    if (!cfg.listed_inputs.empty()) {
      RandomStream times_rng(cfg.seed, std::string(prefix) + "times");
      Dataset ds = collect_dataset(*oracle, cfg.listed_inputs,
                                   sample_times(oracle->horizon(), s.times, times_rng));
      ds.seed = cfg.seed;
      return ds;
    }
    return draw_dataset(*oracle, *cfg.input_set, s, cfg.seed, prefix);
  };
  if (cfg.pilot) out.pilot = draw(*cfg.pilot, kPilotPrefix);
  out.fresh = draw(sizes, "");
  return out;
}

void write_samples(const ExperimentConfig& cfg, const SampledData& data,
                   const fs::path& dataset_path) {
  auto put = [&](const Dataset& ds, const fs::path& p) {
    auto out = open_out(p);
    out << "# config_hash=" << cfg.hash() << "\n";
    write_dataset(ds, out);
  };
  put(data.fresh, dataset_path);
  if (data.pilot) put(*data.pilot, pilot_path(dataset_path));
}

SampledData read_samples(const ExperimentConfig& cfg, const fs::path& dataset_path) {
  SampledData out;
  out.fresh = read_dataset(dataset_path);
  if (cfg.staged()) out.pilot = read_dataset(pilot_path(dataset_path));
  return out;
}

LearnedModel learn_stage(const ExperimentConfig& cfg, const SampledData& data) {
  const ModelTemplate tmpl = cfg.model_template();
  LearnedModel model =
      cfg.staged()
          ? staged_learn_from_data(*data.pilot, data.fresh, tmpl, cfg.budget(), cfg.u_c, cfg.u_xi)
          : learn(data.fresh, tmpl, cfg.u_c, cfg.u_xi, cfg.budget());
  model.provenance.config_hash = cfg.hash();
  return model;
}

void write_model(const ExperimentConfig&, const LearnedModel& model, const fs::path& path) {
  auto out = open_out(path);
  save_model(model, out);
}

Verdict verify_stage(const ExperimentConfig& cfg, const LearnedModel& model) {
  return check_safety(model, cfg.unsafe, cfg.verification_scope(), cfg.budget(),
                      cfg.effective_horizon());
}

void write_verdict_file(const ExperimentConfig& cfg, const Verdict& v, const fs::path& path) {
  auto out = open_out(path);
  write_verdict(v, out, cfg.hash());
}

ValidationReport validate_stage(const ExperimentConfig& cfg, const LearnedModel& model,
                                const fs::path& path) {
  const auto oracle = make_oracle(cfg);
  const double horizon = oracle->horizon();
  ValidationSettings s;
  s.count = cfg.mc_count;
  s.delta_t = cfg.mc_delta_t;
  s.threshold = cfg.mc_threshold_value();
  s.seed = cfg.mc_seed_value();

  ValidationReport report;
  std::vector<std::vector<double>> plot_inputs;
  if (!cfg.listed_inputs.empty()) {
    // Listed inputs are validated themselves, in order.
    report.settings = s;
    report.settings.count = cfg.listed_inputs.size();
    report.horizon = horizon;
    std::size_t good = 0;
    for (const auto& x0 : cfg.listed_inputs) {
      const double f = validate_trajectory(*oracle, model, x0, s.delta_t, horizon);
      report.per_trajectory.push_back({x0, f});
      if (f <= s.threshold) ++good;
    }
    report.ratio = static_cast<double>(good) / static_cast<double>(cfg.listed_inputs.size());
    plot_inputs = cfg.listed_inputs;
  } else {
    report = validate_ensemble(*oracle, model, *cfg.input_set, s);
    for (std::size_t i = 0; i < std::min(cfg.plot_trajectories, report.per_trajectory.size());
         ++i) {
      plot_inputs.push_back(report.per_trajectory[i].input);
    }
  }
  {
    auto out = open_out(path);
    write_validation(report, out, cfg.hash());
  }
  const fs::path dir = path.parent_path();
  {
    // Input-dependent tubes are drawn at the centre of the input set.
    std::vector<double> x0 = plot_inputs.empty() ? std::vector<double>{} : plot_inputs.front();
    if (cfg.input_set) x0 = cfg.input_set->center();
    auto out = open_out(dir / artifact::kTube);
    write_tube_curve(model, x0, horizon, out, cfg.plot_points, cfg.hash());
  }
  {
    auto out = open_out(dir / artifact::kTrajectories);
    write_trajectories(*oracle, model, plot_inputs, horizon, out, cfg.plot_points, cfg.hash());
  }
  return report;
}

int run_pipeline(const ExperimentConfig& cfg, const fs::path& outdir, std::ostream& log) {
  fs::create_directories(outdir);
  Manifest manifest;
  manifest.hash = cfg.hash();
  const fs::path manifest_path = outdir / artifact::kManifest;
  {
    auto out = open_out(outdir / artifact::kConfig);
    out << "# config_hash=" << manifest.hash << "\n" << cfg.effective_text();
    manifest.files.push_back(artifact::kConfig);
  }

  std::string stage;
  auto done = [&](const std::string& name, auto t0) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest.stages.emplace_back(name, "ok");
    log << "[" << name << "] done in " << secs << " s\n";
    manifest.write(manifest_path, "running");
  };

  try {
    stage = "bounds";
    auto t0 = std::chrono::steady_clock::now();
    const SampleSizes sizes = cfg.sample_sizes();
    log << "[bounds] " << describe(cfg.budget()) << " -> M=" << sizes.times
        << " N=" << sizes.inputs << "\n";
    done(stage, t0);

    stage = "sample";
    t0 = std::chrono::steady_clock::now();
    const SampledData data = cfg.has_oracle() ? sample_stage(cfg) : read_samples(cfg, cfg.dataset);
    if (cfg.has_oracle()) {
      write_samples(cfg, data, outdir / artifact::kDataset);
      manifest.files.push_back(artifact::kDataset);
      if (data.pilot) manifest.files.push_back(pilot_path(artifact::kDataset).string());
    }
    done(stage, t0);

    stage = "learn";
    t0 = std::chrono::steady_clock::now();
    const LearnedModel model = learn_stage(cfg, data);
    write_model(cfg, model, outdir / artifact::kModel);
    manifest.files.push_back(artifact::kModel);
    log << "[learn] xi=" << format_double(model.xi) << "\n";
    done(stage, t0);

    stage = "verify";
    t0 = std::chrono::steady_clock::now();
    const Verdict verdict = verify_stage(cfg, model);
    write_verdict_file(cfg, verdict, outdir / artifact::kVerdict);
    manifest.files.push_back(artifact::kVerdict);
    log << verdict.text();
    done(stage, t0);

    if (cfg.has_oracle()) {
      stage = "validate";
      t0 = std::chrono::steady_clock::now();
      const ValidationReport report = validate_stage(cfg, model, outdir / artifact::kValidation);
      manifest.files.push_back(artifact::kValidation);
      manifest.files.push_back(artifact::kTube);
      manifest.files.push_back(artifact::kTrajectories);
      log << "[validate] ratio=" << format_double(report.ratio)
          << " threshold=" << format_double(report.settings.threshold) << "\n";
      done(stage, t0);
    } else {
      manifest.stages.emplace_back("validate", "skipped (no simulator)");
    }
  } catch (const std::exception& e) {
    const int code = exit_code_for(e, stage);
    manifest.stages.emplace_back(stage, std::string("failed: ") + e.what());
    manifest.write(manifest_path, "failed");
    log << "[" << stage << "] error: " << e.what() << "\n";
    return code;
  }
  manifest.write(manifest_path, "complete");
  return kExitOk;
}

}  // namespace pacmc
