#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "noisebench/eval.hpp"
#include "noisebench/ingest.hpp"

namespace noisebench {

// Name of the environment variable holding the default dataset root, used
// when a config names neither a root nor a synth spec.
inline constexpr const char* kDatasetRootEnvVar = "NOISEBENCH_DATASET_ROOT";

// Fully resolved run description. After resolve_seeds() every seed is
// explicit, and resolved_config_json() echoes exactly what will run.
struct RunConfig {
  std::uint64_t master_seed = 1;
  bool seed_given = false;

  std::optional<std::string> dataset_root;  // exactly one of root / synth
  std::optional<SynthSpec> synth;
  std::uint64_t synth_seed = 0;
  ShapeConfig shape;

  PipelineConfig pipeline;
  std::vector<ModelSpec> models;  // default: the five benchmark families
  EvalConfig eval;
  NoisePlan noise;
  std::vector<double> snr_grid{40.0, 30.0, 20.0, 10.0, 5.0};
  std::string output_dir = "out";

  // Track which seeds the file pinned, so a --seed override re-derives the rest.
  bool shuffle_seed_given = false;
  bool noise_seed_given = false;
  bool synth_seed_given = false;
  std::vector<bool> model_seed_given;
};

RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& file);

// Materializes every unset seed from the master seed.
void resolve_seeds(RunConfig& cfg);

nlohmann::ordered_json resolved_config_json(const RunConfig& cfg);

// Loads from the dataset root or synthesizes, per the config's data source.
Dataset load_config_dataset(const RunConfig& cfg, unsigned jobs);

}  // namespace noisebench
