#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "noisebench/dataset.hpp"
#include "noisebench/features.hpp"
#include "noisebench/models.hpp"
#include "noisebench/pca.hpp"
#include "noisebench/scaler.hpp"
#include "noisebench/signal.hpp"

namespace noisebench {

enum class EvalMode { KFold, Holdout };

struct EvalConfig {
  EvalMode mode = EvalMode::KFold;
  int k = 5;
  double holdout_fraction = 0.2;  // validation share, stratified
  std::uint64_t shuffle_seed = 0;
};

// Fold id in [0, k) per segment. Per-class counts across folds differ by at
// most one; deterministic given the seed.
std::vector<int> stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed);

double accuracy(std::span<const int> y_true, std::span<const int> y_pred);

struct FoldSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// KFold: k splits; Holdout: one stratified split of the given fraction.
std::vector<FoldSplit> make_splits(std::span<const int> labels, const EvalConfig& cfg);

struct PipelineConfig {
  FeatureConfig features;
  PcaConfig pca;  // applied only for specs with use_pca
};

// Per-fold fitted preprocessing; fitted on training rows only.
struct FittedPipeline {
  Scaler scaler;
  std::optional<PcaModel> pca;

  std::uint64_t param_hash() const;
};

FittedPipeline fit_pipeline(const Matrix& X_train, const PipelineConfig& cfg, bool with_pca);
Matrix apply_pipeline(const FittedPipeline& p, const Matrix& X);

// One grid cell: a model evaluated clean (snr_db absent) or at one SNR.
struct CellResult {
  std::string model_id;
  std::optional<double> snr_db;
  double clean_accuracy = 0.0;
  double noisy_accuracy_mean = 0.0;
  double noisy_accuracy_std = 0.0;
  double loss_pp = 0.0;  // 100 * (noisy_mean - clean)
  double wall_seconds = 0.0;
};

struct RobustnessReport {
  std::string run_id;
  std::uint64_t master_seed = 0;
  std::string resolved_config_json;  // opaque echo, set by the caller
  std::uint64_t data_checksum = 0;
  std::size_t n_segments = 0;
  std::size_t n_channels = 0;
  int n_classes = 0;
  std::vector<double> snr_grid;  // requested order
  std::vector<CellResult> baseline;
  std::vector<CellResult> sweep;  // model-major, grid order within model
};

// Combined hash per fold over the fitted scaler, PCA and every model's
// parameters, computed through the same fitting path run_sweep uses.
// Validation-fold contents must never influence these values (leakage
// guard: fits see training rows only).
std::vector<std::uint64_t> fold_fit_fingerprints(const Dataset& ds,
                                                 const std::vector<ModelSpec>& specs,
                                                 const PipelineConfig& pipeline_cfg,
                                                 const EvalConfig& eval_cfg);

// Clean cross-validated accuracy per model spec (Table-2-style baseline).
std::vector<CellResult> run_baseline(const Dataset& ds, const std::vector<ModelSpec>& specs,
                                     const PipelineConfig& pipeline_cfg, const EvalConfig& eval_cfg,
                                     unsigned jobs = 1);

// Trains on clean folds once, then evaluates every (model, snr, trial) cell
// on noise-injected validation segments. Noise enters the raw signals
// before feature extraction; training data never receives noise.
RobustnessReport run_sweep(const Dataset& ds, const std::vector<ModelSpec>& specs,
                           const std::vector<double>& snr_grid, const NoisePlan& plan,
                           const PipelineConfig& pipeline_cfg, const EvalConfig& eval_cfg,
                           unsigned jobs = 1);

}  // namespace noisebench
