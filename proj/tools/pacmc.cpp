// pacmc: learn PAC tube models of black-box trajectories and check them
// against an unsafe set. Run `pacmc --help` for the subcommands.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "pacmc/config.hpp"
#include "pacmc/error.hpp"
#include "pacmc/model_io.hpp"
#include "pacmc/pac_bounds.hpp"
#include "pacmc/pipeline.hpp"

namespace fs = std::filesystem;
using namespace pacmc;

namespace {

template <typename F>
int guarded(const std::string& stage, F&& body) {
  try {
    body();
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "pacmc " << stage << ": " << e.what() << "\n";
    return exit_code_for(e, stage);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAC tube models for black-box trajectories"};
  app.require_subcommand(1);

  double epsilon = 0, beta = 0, epsilon2 = 0, beta2 = 0;
  std::size_t dims = 0;
  auto* bounds = app.add_subcommand("bounds", "Print the sample sizes a budget requires");
  bounds->add_option("--epsilon", epsilon, "Error level (epsilon or epsilon1)")->required();
  bounds->add_option("--beta", beta, "Confidence parameter (beta or beta1)")->required();
  bounds->add_option("--dims", dims, "Decision variables (coefficients + 1)")->required();
  auto* eps2_opt = bounds->add_option("--epsilon2", epsilon2, "Input-level error level");
  auto* beta2_opt = bounds->add_option("--beta2", beta2, "Input-level confidence parameter");
  eps2_opt->needs(beta2_opt);
  beta2_opt->needs(eps2_opt);

  std::string config, data, model, out, outdir;
  auto* sample = app.add_subcommand("sample", "Simulate the training dataset");
  sample->add_option("--config", config)->required()->check(CLI::ExistingFile);
  sample->add_option("--out", out, "Dataset CSV")->required();

  auto* learn = app.add_subcommand("learn", "Solve the scenario program");
  learn->add_option("--config", config)->required()->check(CLI::ExistingFile);
  learn->add_option("--data", data, "Dataset CSV from `sample`")->required();
  learn->add_option("--out", out, "Model file")->required();

  auto* verify = app.add_subcommand("verify", "Check the tube against the unsafe set");
  verify->add_option("--config", config)->required()->check(CLI::ExistingFile);
  verify->add_option("--model", model)->required()->check(CLI::ExistingFile);
  verify->add_option("--out", out, "Verdict report")->required();

  auto* validate = app.add_subcommand("validate", "Monte-Carlo validation and plot data");
  validate->add_option("--config", config)->required()->check(CLI::ExistingFile);
  validate->add_option("--model", model)->required()->check(CLI::ExistingFile);
  validate->add_option("--out", out, "Validation CSV (plot files go next to it)")->required();

  auto* run = app.add_subcommand("run", "All stages into one directory");
  run->add_option("--config", config)->required()->check(CLI::ExistingFile);
  run->add_option("--outdir", outdir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*bounds) {
    return guarded("bounds", [&] {
      if (*eps2_opt) {
        const SampleSizes s = two_level_budget({epsilon, beta, epsilon2, beta2, dims});
        std::cout << "M=" << s.times << " N=" << s.inputs << "\n";
      } else {
        PacBudget{epsilon, beta, dims}.validate();
        std::cout << "M=" << min_samples(epsilon, beta, dims) << "\n";
      }
    });
  }

  ExperimentConfig cfg;
  if (const int rc = guarded("config", [&] { cfg = load_config(config); })) return rc;

  if (*sample) {
    return guarded("sample", [&] {
      const SampledData d = sample_stage(cfg);
      write_samples(cfg, d, out);
      std::cout << "wrote " << out << " (M=" << d.fresh.time_count()
                << " N=" << d.fresh.input_count() << ")\n";
    });
  }
  if (*learn) {
    return guarded("learn", [&] {
      const LearnedModel m = learn_stage(cfg, read_samples(cfg, data));
      write_model(cfg, m, out);
      std::cout << "xi=" << format_double(m.xi) << "\n";
    });
  }
  if (*verify) {
    return guarded("verify", [&] {
      const Verdict v = verify_stage(cfg, load_model(fs::path(model)));
      write_verdict_file(cfg, v, out);
      std::cout << v.text();
    });
  }
  if (*validate) {
    return guarded("validate", [&] {
      const ValidationReport r = validate_stage(cfg, load_model(fs::path(model)), out);
      std::cout << "ratio=" << format_double(r.ratio)
                << " threshold=" << format_double(r.settings.threshold) << "\n";
    });
  }
  return run_pipeline(cfg, outdir, std::cout);
}
