#include "noisebench/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "noisebench/error.hpp"
#include "noisebench/parallel.hpp"
#include "noisebench/rng.hpp"

namespace noisebench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Per-fold fitted state: preprocessing variants plus one model per spec.
struct FoldFit {
  FittedPipeline plain;
  std::optional<FittedPipeline> with_pca;
  std::vector<std::unique_ptr<TrainedModel>> models;
  std::vector<double> fit_seconds;  // per spec
};

FoldFit fit_fold(const Dataset& ds, std::span<const std::size_t> train,
                 const std::vector<ModelSpec>& specs, const PipelineConfig& cfg) {
  Matrix X_train_raw = feature_matrix(ds, cfg.features, train);
  std::vector<int> y_train;
  y_train.reserve(train.size());
  for (std::size_t i : train) y_train.push_back(ds.segments[i].label);

  FoldFit fit;
  fit.plain = fit_pipeline(X_train_raw, cfg, false);
  bool any_pca = std::any_of(specs.begin(), specs.end(),
                             [](const ModelSpec& s) { return s.use_pca; });
  if (any_pca) fit.with_pca = fit_pipeline(X_train_raw, cfg, true);

  Matrix X_plain = apply_pipeline(fit.plain, X_train_raw);
  Matrix X_pca;
  if (any_pca) X_pca = apply_pipeline(*fit.with_pca, X_train_raw);

  for (const ModelSpec& spec : specs) {
    auto start = Clock::now();
    const Matrix& X = spec.use_pca ? X_pca : X_plain;
    try {
      fit.models.push_back(fit_model(spec, X, y_train, ds.n_classes));
    } catch (const Error& e) {
      throw Error(e.kind(), "model '" + spec.id + "': " + e.what());
    }
    fit.fit_seconds.push_back(seconds_since(start));
  }
  return fit;
}

struct SweepAccumulator {
  // accuracies[model][snr][fold * trials + trial]
  std::vector<std::vector<std::vector<double>>> accuracies;
  std::vector<std::vector<std::vector<double>>> seconds;
};

double sample_std(std::span<const double> values, double mean) {
  if (values.size() < 2) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

}  // namespace

std::vector<int> stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw config_error("stratified_kfold: k must be >= 2");
  int n_classes = 0;
  for (int label : labels) n_classes = std::max(n_classes, label);

  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(n_classes) + 1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1) throw argument_error("stratified_kfold: labels must be >= 1");
    members[static_cast<std::size_t>(labels[i])].push_back(i);
  }

  std::vector<int> folds(labels.size(), 0);
  Rng rng(mix64_seq({seed, 0x4B46'4F4C'4400ULL}));
  int class_rank = 0;
  for (int c = 1; c <= n_classes; ++c) {
    auto& group = members[static_cast<std::size_t>(c)];
    if (group.empty()) continue;
    if (group.size() < static_cast<std::size_t>(k))
      throw config_error("stratified_kfold: class " + std::to_string(c) + " has " +
                         std::to_string(group.size()) + " members, fewer than k=" +
                         std::to_string(k));
    rng.shuffle(group);
    // Rotating the start fold per class spreads the remainders evenly.
    for (std::size_t i = 0; i < group.size(); ++i)
      folds[group[i]] = static_cast<int>((i + static_cast<std::size_t>(class_rank)) %
                                         static_cast<std::size_t>(k));
    ++class_rank;
  }
  return folds;
}

double accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty())
    throw argument_error("accuracy: length mismatch or empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i)
    if (y_true[i] == y_pred[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

std::vector<FoldSplit> make_splits(std::span<const int> labels, const EvalConfig& cfg) {
  std::vector<FoldSplit> splits;
  if (cfg.mode == EvalMode::KFold) {
    std::vector<int> folds = stratified_kfold(labels, cfg.k, cfg.shuffle_seed);
    splits.resize(static_cast<std::size_t>(cfg.k));
    for (std::size_t i = 0; i < labels.size(); ++i) {
      for (int f = 0; f < cfg.k; ++f) {
        if (folds[i] == f)
          splits[static_cast<std::size_t>(f)].validation.push_back(i);
        else
          splits[static_cast<std::size_t>(f)].train.push_back(i);
      }
    }
    return splits;
  }

  if (!(cfg.holdout_fraction > 0.0) || cfg.holdout_fraction > 0.5)
    throw config_error("holdout fraction must be in (0, 0.5]");
  int n_classes = 0;
  for (int label : labels) n_classes = std::max(n_classes, label);
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(n_classes) + 1);
  for (std::size_t i = 0; i < labels.size(); ++i)
    members[static_cast<std::size_t>(labels[i])].push_back(i);

  FoldSplit split;
  Rng rng(mix64_seq({cfg.shuffle_seed, 0x484F'4C44'4F55'5400ULL}));
  for (int c = 1; c <= n_classes; ++c) {
    auto& group = members[static_cast<std::size_t>(c)];
    if (group.size() < 2)
      throw config_error("holdout: class " + std::to_string(c) + " needs at least 2 members");
    rng.shuffle(group);
    auto n_valid = static_cast<std::size_t>(
        std::lround(cfg.holdout_fraction * static_cast<double>(group.size())));
    n_valid = std::clamp<std::size_t>(n_valid, 1, group.size() - 1);
    for (std::size_t i = 0; i < group.size(); ++i)
      (i < n_valid ? split.validation : split.train).push_back(group[i]);
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  splits.push_back(std::move(split));
  return splits;
}

std::uint64_t FittedPipeline::param_hash() const {
  std::uint64_t h = scaler.param_hash();
  if (pca) {
    h ^= pca->param_hash();
    h *= 0x100000001B3ULL;
  }
  return h;
}

FittedPipeline fit_pipeline(const Matrix& X_train, const PipelineConfig& cfg, bool with_pca) {
  FittedPipeline fitted;
  fitted.scaler = scaler_fit(X_train);
  if (with_pca) {
    Matrix standardized = scaler_apply(fitted.scaler, X_train);
    fitted.pca = pca_fit(standardized, cfg.pca);
  }
  return fitted;
}

Matrix apply_pipeline(const FittedPipeline& p, const Matrix& X) {
  Matrix out = scaler_apply(p.scaler, X);
  if (p.pca) out = pca_apply(*p.pca, out);
  return out;
}

std::vector<CellResult> run_baseline(const Dataset& ds, const std::vector<ModelSpec>& specs,
                                     const PipelineConfig& pipeline_cfg, const EvalConfig& eval_cfg,
                                     unsigned jobs) {
  RobustnessReport report = run_sweep(ds, specs, {}, NoisePlan{}, pipeline_cfg, eval_cfg, jobs);
  return report.baseline;
}

std::vector<std::uint64_t> fold_fit_fingerprints(const Dataset& ds,
                                                 const std::vector<ModelSpec>& specs,
                                                 const PipelineConfig& pipeline_cfg,
                                                 const EvalConfig& eval_cfg) {
  const std::vector<int> labels = dataset_labels(ds);
  const std::vector<FoldSplit> splits = make_splits(labels, eval_cfg);
  std::vector<std::uint64_t> fingerprints;
  fingerprints.reserve(splits.size());
  for (const FoldSplit& split : splits) {
    FoldFit fit = fit_fold(ds, split.train, specs, pipeline_cfg);
    std::uint64_t h = fit.plain.param_hash();
    if (fit.with_pca) {
      h ^= fit.with_pca->param_hash();
      h *= 0x100000001B3ULL;
    }
    for (const auto& model : fit.models) {
      h ^= model->param_hash();
      h *= 0x100000001B3ULL;
    }
    fingerprints.push_back(h);
  }
  return fingerprints;
}

RobustnessReport run_sweep(const Dataset& ds, const std::vector<ModelSpec>& specs,
                           const std::vector<double>& snr_grid, const NoisePlan& plan,
                           const PipelineConfig& pipeline_cfg, const EvalConfig& eval_cfg,
                           unsigned jobs) {
  if (specs.empty()) throw config_error("run_sweep: no model specs");
  if (plan.trials < 1) throw config_error("run_sweep: trials must be >= 1");

  const std::vector<int> labels = dataset_labels(ds);
  const std::vector<FoldSplit> splits = make_splits(labels, eval_cfg);
  const std::size_t n_folds = splits.size();
  const std::size_t n_models = specs.size();
  const std::size_t n_snrs = snr_grid.size();
  const auto n_trials = static_cast<std::size_t>(plan.trials);

  // Stage A: fit pipelines and models per fold; score clean validation data.
  std::vector<FoldFit> fold_fits(n_folds);
  std::vector<std::vector<double>> clean_acc(n_models, std::vector<double>(n_folds, 0.0));
  std::vector<std::vector<double>> clean_seconds(n_models, std::vector<double>(n_folds, 0.0));
  parallel_for(n_folds, jobs, [&](std::size_t f) {
    const FoldSplit& split = splits[f];
    try {
      fold_fits[f] = fit_fold(ds, split.train, specs, pipeline_cfg);
    } catch (const Error& e) {
      throw Error(e.kind(), "fold " + std::to_string(f) + ": " + e.what());
    }
    Matrix X_valid_raw = feature_matrix(ds, pipeline_cfg.features, split.validation);
    std::vector<int> y_valid;
    y_valid.reserve(split.validation.size());
    for (std::size_t i : split.validation) y_valid.push_back(ds.segments[i].label);

    Matrix X_plain = apply_pipeline(fold_fits[f].plain, X_valid_raw);
    Matrix X_pca;
    if (fold_fits[f].with_pca) X_pca = apply_pipeline(*fold_fits[f].with_pca, X_valid_raw);
    for (std::size_t m = 0; m < n_models; ++m) {
      auto start = Clock::now();
      std::vector<int> pred = fold_fits[f].models[m]->predict(specs[m].use_pca ? X_pca : X_plain);
      clean_acc[m][f] = accuracy(y_valid, pred);
      clean_seconds[m][f] = seconds_since(start) + fold_fits[f].fit_seconds[m];
    }
  });

  // Stage B: every (fold, snr, trial) evaluation is one independent unit.
  SweepAccumulator acc;
  acc.accuracies.assign(n_models, std::vector<std::vector<double>>(
                                      n_snrs, std::vector<double>(n_folds * n_trials, 0.0)));
  acc.seconds = acc.accuracies;
  const std::size_t n_units = n_folds * n_snrs * n_trials;
  parallel_for(n_units, jobs, [&](std::size_t u) {
    const std::size_t f = u / (n_snrs * n_trials);
    const std::size_t s = (u / n_trials) % n_snrs;
    const auto t = static_cast<int>(u % n_trials);
    const FoldSplit& split = splits[f];

    NoisePlan cell_plan = plan;
    cell_plan.snr_db = snr_grid[s];

    const std::size_t d =
        pipeline_cfg.features.feature_count(ds.n_samples(), ds.n_channels());
    Matrix X_noisy_raw(split.validation.size(), d);
    std::vector<int> y_valid;
    y_valid.reserve(split.validation.size());
    for (std::size_t r = 0; r < split.validation.size(); ++r) {
      const std::size_t ordinal = split.validation[r];
      InjectResult injected = inject(ds.segments[ordinal], ordinal, cell_plan, t);
      std::vector<double> feats = extract_features(injected.segment, pipeline_cfg.features);
      auto row = X_noisy_raw.row(r);
      std::copy(feats.begin(), feats.end(), row.begin());
      y_valid.push_back(ds.segments[ordinal].label);
    }

    Matrix X_plain = apply_pipeline(fold_fits[f].plain, X_noisy_raw);
    Matrix X_pca;
    if (fold_fits[f].with_pca) X_pca = apply_pipeline(*fold_fits[f].with_pca, X_noisy_raw);
    for (std::size_t m = 0; m < n_models; ++m) {
      auto start = Clock::now();
      std::vector<int> pred;
      try {
        pred = fold_fits[f].models[m]->predict(specs[m].use_pca ? X_pca : X_plain);
      } catch (const Error& e) {
        throw Error(e.kind(), "cell (model " + specs[m].id + ", snr " +
                                  std::to_string(snr_grid[s]) + " dB, fold " + std::to_string(f) +
                                  ", trial " + std::to_string(t) + "): " + e.what());
      }
      acc.accuracies[m][s][f * n_trials + static_cast<std::size_t>(t)] = accuracy(y_valid, pred);
      acc.seconds[m][s][f * n_trials + static_cast<std::size_t>(t)] = seconds_since(start);
    }
  });

  RobustnessReport report;
  report.master_seed = plan.master_seed;
  report.data_checksum = dataset_checksum(ds);
  report.n_segments = ds.segments.size();
  report.n_channels = ds.n_channels();
  report.n_classes = ds.n_classes;
  report.snr_grid = snr_grid;

  for (std::size_t m = 0; m < n_models; ++m) {
    CellResult cell;
    cell.model_id = specs[m].id;
    double mean = 0.0, seconds = 0.0;
    for (std::size_t f = 0; f < n_folds; ++f) {
      mean += clean_acc[m][f];
      seconds += clean_seconds[m][f];
    }
    mean /= static_cast<double>(n_folds);
    cell.clean_accuracy = mean;
    cell.noisy_accuracy_mean = mean;
    cell.noisy_accuracy_std = sample_std(clean_acc[m], mean);
    cell.loss_pp = 0.0;
    cell.wall_seconds = seconds;
    report.baseline.push_back(std::move(cell));
  }

  for (std::size_t m = 0; m < n_models; ++m) {
    for (std::size_t s = 0; s < n_snrs; ++s) {
      const auto& values = acc.accuracies[m][s];
      CellResult cell;
      cell.model_id = specs[m].id;
      cell.snr_db = snr_grid[s];
      cell.clean_accuracy = report.baseline[m].clean_accuracy;
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      cell.noisy_accuracy_mean = mean;
      cell.noisy_accuracy_std = sample_std(values, mean);
      cell.loss_pp = 100.0 * (mean - cell.clean_accuracy);
      for (double sec : acc.seconds[m][s]) cell.wall_seconds += sec;
      report.sweep.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace noisebench
