#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "pacmc/config.hpp"
#include "pacmc/montecarlo.hpp"
#include "pacmc/oracle.hpp"
#include "pacmc/verification.hpp"

namespace pacmc {

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitInsufficientSamples = 3,
  kExitSolver = 4,
  kExitVerdict = 5,
};

// Exit code for an exception escaping `stage` ("sample", "learn", ...).
int exit_code_for(const std::exception& e, const std::string& stage);

// Artifact names shared by `run` and the individual subcommands.
namespace artifact {
inline constexpr const char* kDataset = "dataset.csv";
inline constexpr const char* kModel = "model.txt";
inline constexpr const char* kVerdict = "verdict.txt";
inline constexpr const char* kValidation = "validation.csv";
inline constexpr const char* kTube = "tube.csv";
inline constexpr const char* kTrajectories = "trajectories.csv";
inline constexpr const char* kConfig = "config.effective.ini";
inline constexpr const char* kManifest = "MANIFEST";
}  // namespace artifact

// dataset.csv -> dataset.pilot.csv
std::filesystem::path pilot_path(const std::filesystem::path& dataset_path);

std::shared_ptr<SimulatedOracle> make_oracle(const ExperimentConfig& cfg);

struct SampledData {
  Dataset fresh;
  std::optional<Dataset> pilot;  // staged configs only
};

SampledData sample_stage(const ExperimentConfig& cfg);
void write_samples(const ExperimentConfig& cfg, const SampledData& data,
                   const std::filesystem::path& dataset_path);
SampledData read_samples(const ExperimentConfig& cfg, const std::filesystem::path& dataset_path);

LearnedModel learn_stage(const ExperimentConfig& cfg, const SampledData& data);
void write_model(const ExperimentConfig& cfg, const LearnedModel& model,
                 const std::filesystem::path& path);

Verdict verify_stage(const ExperimentConfig& cfg, const LearnedModel& model);
void write_verdict_file(const ExperimentConfig& cfg, const Verdict& v,
                        const std::filesystem::path& path);

// Writes the validation CSV to `path` and the plot data next to it.
ValidationReport validate_stage(const ExperimentConfig& cfg, const LearnedModel& model,
                                const std::filesystem::path& path);

// bounds -> sample -> learn -> verify -> validate into `outdir`. A MANIFEST
// records each stage's outcome, including the one that failed.
int run_pipeline(const ExperimentConfig& cfg, const std::filesystem::path& outdir,
                 std::ostream& log);

}  // namespace pacmc
