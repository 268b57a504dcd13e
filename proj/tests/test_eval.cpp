#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "noisebench/error.hpp"
#include "noisebench/eval.hpp"
#include "noisebench/ingest.hpp"

using namespace noisebench;

namespace {

SynthSpec small_synth() {
  SynthSpec spec;
  spec.n_classes = 4;
  spec.n_subjects = 2;
  spec.segments_per_cell = 10;
  spec.n_channels = 6;
  spec.n_samples = 40;
  return spec;
}

std::vector<ModelSpec> fast_specs() {
  std::vector<ModelSpec> specs = default_model_specs();
  for (auto& spec : specs) {
    spec.seed = 1000 + spec.seed;
    spec.mlp.epochs = 15;
    spec.mlp.hidden_layers = {32, 16};
    spec.forest.n_trees = 20;
  }
  return specs;
}

}  // namespace

TEST_CASE("stratified_kfold balances 20 samples of 2 classes over 5 folds") {
  std::vector<int> labels;
  for (int i = 0; i < 10; ++i) labels.push_back(1);
  for (int i = 0; i < 10; ++i) labels.push_back(2);
  auto folds = stratified_kfold(labels, 5, 42);
  REQUIRE(folds.size() == 20);
  int per_fold_class[5][3] = {};
  for (std::size_t i = 0; i < labels.size(); ++i) ++per_fold_class[folds[i]][labels[i]];
  for (int f = 0; f < 5; ++f) {
    CHECK(per_fold_class[f][1] == 2);
    CHECK(per_fold_class[f][2] == 2);
  }
}

TEST_CASE("stratified_kfold is deterministic per seed") {
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) labels.push_back(1 + i % 3);
  CHECK(stratified_kfold(labels, 5, 7) == stratified_kfold(labels, 5, 7));
  CHECK(stratified_kfold(labels, 5, 7) != stratified_kfold(labels, 5, 8));
}

TEST_CASE("stratified_kfold on the full-dataset shape: 96 per class per fold") {
  // 19 classes x 8 subjects x 60 segments; 480 per class over 5 folds.
  std::vector<int> labels;
  for (int c = 1; c <= 19; ++c)
    for (int i = 0; i < 480; ++i) labels.push_back(c);
  auto folds = stratified_kfold(labels, 5, 99);
  std::vector<std::vector<int>> count(5, std::vector<int>(20, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) ++count[folds[i]][labels[i]];
  for (int f = 0; f < 5; ++f)
    for (int c = 1; c <= 19; ++c) CHECK(count[f][c] == 96);
}

TEST_CASE("stratified_kfold rejects classes smaller than k") {
  std::vector<int> labels{1, 1, 1, 2, 2};
  CHECK_THROWS_AS(stratified_kfold(labels, 3, 1), Error);
  CHECK_THROWS_AS(stratified_kfold(labels, 1, 1), Error);
}

TEST_CASE("accuracy basics") {
  std::vector<int> a{1, 2, 3, 4};
  CHECK(accuracy(a, a) == 1.0);
  std::vector<int> b{4, 3, 2, 1};
  CHECK(accuracy(a, b) == 0.0);
  std::vector<int> c{1, 2, 3, 1};
  CHECK(accuracy(a, c) == 0.75);
  CHECK_THROWS_AS(accuracy(a, std::vector<int>{1}), Error);
  CHECK_THROWS_AS(accuracy(std::vector<int>{}, std::vector<int>{}), Error);
}

TEST_CASE("holdout split is stratified and respects the fraction") {
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) labels.push_back(1 + i % 4);
  EvalConfig cfg;
  cfg.mode = EvalMode::Holdout;
  cfg.holdout_fraction = 0.2;
  cfg.shuffle_seed = 5;
  auto splits = make_splits(labels, cfg);
  REQUIRE(splits.size() == 1);
  CHECK(splits[0].validation.size() == 8);
  CHECK(splits[0].train.size() == 32);
  std::vector<int> valid_count(5, 0);
  for (std::size_t i : splits[0].validation) ++valid_count[labels[i]];
  for (int c = 1; c <= 4; ++c) CHECK(valid_count[c] == 2);
}

TEST_CASE("degenerate rig: knn(k=1) evaluated on its own training fold is perfect") {
  Dataset ds = synth_dataset(small_synth(), 11);
  PipelineConfig pipeline;
  ModelSpec spec;
  spec.family = ModelFamily::Knn;
  spec.knn.k = 1;
  spec.id = "knn1";

  std::vector<std::size_t> all(ds.segments.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  Matrix X_raw = feature_matrix(ds, pipeline.features, all);
  FittedPipeline fitted = fit_pipeline(X_raw, pipeline, false);
  Matrix X = apply_pipeline(fitted, X_raw);
  std::vector<int> y = dataset_labels(ds);
  auto model = fit_model(spec, X, y, ds.n_classes);
  CHECK(accuracy(y, model->predict(X)) == 1.0);
}

TEST_CASE("run_baseline: all five specs reach 0.95 on the separable synthetic set") {
  Dataset ds = synth_dataset(small_synth(), 2026);
  EvalConfig eval_cfg;
  eval_cfg.shuffle_seed = 77;
  PipelineConfig pipeline;
  auto cells = run_baseline(ds, fast_specs(), pipeline, eval_cfg);
  REQUIRE(cells.size() == 5);
  for (const auto& cell : cells) {
    INFO("model ", cell.model_id);
    CHECK(cell.clean_accuracy >= 0.95);
    CHECK(cell.snr_db.has_value() == false);
    CHECK(cell.loss_pp == 0.0);
  }
}

TEST_CASE("synthetic separability oracle: knn(k=1) 5-fold accuracy >= 0.99") {
  SynthSpec spec = small_synth();
  Dataset ds = synth_dataset(spec, 7);
  EvalConfig eval_cfg;
  eval_cfg.shuffle_seed = 3;
  PipelineConfig pipeline;
  ModelSpec knn;
  knn.family = ModelFamily::Knn;
  knn.knn.k = 1;
  knn.id = "knn1";
  auto cells = run_baseline(ds, {knn}, pipeline, eval_cfg);
  CHECK(cells[0].clean_accuracy >= 0.99);
}

TEST_CASE("run_sweep at 40 dB barely moves accuracy on synthetic data") {
  Dataset ds = synth_dataset(small_synth(), 505);
  EvalConfig eval_cfg;
  eval_cfg.shuffle_seed = 1;
  PipelineConfig pipeline;
  NoisePlan plan;
  plan.trials = 2;
  plan.master_seed = 999;
  RobustnessReport report = run_sweep(ds, fast_specs(), {40.0}, plan, pipeline, eval_cfg);
  REQUIRE(report.sweep.size() == 5);
  for (const auto& cell : report.sweep) {
    INFO("model ", cell.model_id);
    CHECK(std::fabs(cell.loss_pp) <= 1.0);
  }
}

TEST_CASE("run_sweep with the +inf sentinel reproduces clean accuracy exactly") {
  Dataset ds = synth_dataset(small_synth(), 321);
  EvalConfig eval_cfg;
  eval_cfg.shuffle_seed = 9;
  PipelineConfig pipeline;
  NoisePlan plan;
  plan.trials = 2;
  plan.master_seed = 10;
  double inf = std::numeric_limits<double>::infinity();
  RobustnessReport report = run_sweep(ds, fast_specs(), {inf}, plan, pipeline, eval_cfg);
  for (const auto& cell : report.sweep) {
    CHECK(cell.noisy_accuracy_mean == cell.clean_accuracy);
    CHECK(cell.loss_pp == 0.0);
    CHECK(cell.noisy_accuracy_std == 0.0);
  }
}

TEST_CASE("run_sweep is deterministic and jobs-invariant") {
  Dataset ds = synth_dataset(small_synth(), 66);
  EvalConfig eval_cfg;
  eval_cfg.shuffle_seed = 4;
  PipelineConfig pipeline;
  NoisePlan plan;
  plan.trials = 2;
  plan.master_seed = 31;
  auto specs = fast_specs();

  RobustnessReport a = run_sweep(ds, specs, {30.0, 10.0}, plan, pipeline, eval_cfg, 1);
  RobustnessReport b = run_sweep(ds, specs, {30.0, 10.0}, plan, pipeline, eval_cfg, 4);
  REQUIRE(a.sweep.size() == b.sweep.size());
  for (std::size_t i = 0; i < a.sweep.size(); ++i) {
    CHECK(a.sweep[i].model_id == b.sweep[i].model_id);
    CHECK(a.sweep[i].noisy_accuracy_mean == b.sweep[i].noisy_accuracy_mean);
    CHECK(a.sweep[i].noisy_accuracy_std == b.sweep[i].noisy_accuracy_std);
    CHECK(a.sweep[i].loss_pp == b.sweep[i].loss_pp);
  }
  for (std::size_t i = 0; i < a.baseline.size(); ++i)
    CHECK(a.baseline[i].clean_accuracy == b.baseline[i].clean_accuracy);
}

TEST_CASE("grid completeness: every requested (model, snr) appears exactly once") {
  Dataset ds = synth_dataset(small_synth(), 14);
  EvalConfig eval_cfg;
  eval_cfg.shuffle_seed = 2;
  PipelineConfig pipeline;
  NoisePlan plan;
  plan.trials = 1;
  plan.master_seed = 3;
  std::vector<double> grid{40.0, 20.0, 5.0};
  auto specs = fast_specs();
  RobustnessReport report = run_sweep(ds, specs, grid, plan, pipeline, eval_cfg);
  CHECK(report.sweep.size() == specs.size() * grid.size());
  for (const auto& spec : specs) {
    for (double snr : grid) {
      int hits = 0;
      for (const auto& cell : report.sweep)
        if (cell.model_id == spec.id && cell.snr_db && *cell.snr_db == snr) ++hits;
      CHECK(hits == 1);
    }
  }
}

TEST_CASE("monotonic degradation within 1pp tolerance on the synthetic sweep") {
  Dataset ds = synth_dataset(small_synth(), 2027);
  EvalConfig eval_cfg;
  eval_cfg.shuffle_seed = 5;
  PipelineConfig pipeline;
  NoisePlan plan;
  plan.trials = 3;
  plan.master_seed = 17;
  std::vector<double> grid{40.0, 30.0, 20.0, 10.0, 5.0};
  RobustnessReport report = run_sweep(ds, fast_specs(), grid, plan, pipeline, eval_cfg);
  for (std::size_t m = 0; m < report.baseline.size(); ++m) {
    for (std::size_t s = 1; s < grid.size(); ++s) {
      const CellResult& harder = report.sweep[m * grid.size() + s];
      const CellResult& easier = report.sweep[m * grid.size() + s - 1];
      INFO("model ", harder.model_id, " at ", grid[s], " dB");
      CHECK(harder.noisy_accuracy_mean <= easier.noisy_accuracy_mean + 0.01);
    }
  }
}

TEST_CASE("leakage guard: mutating validation folds never changes fitted parameters") {
  Dataset ds = synth_dataset(small_synth(), 888);
  EvalConfig eval_cfg;
  eval_cfg.shuffle_seed = 12;
  PipelineConfig pipeline;
  auto specs = fast_specs();

  auto baseline_prints = fold_fit_fingerprints(ds, specs, pipeline, eval_cfg);

  // Corrupt every validation segment of fold 0 and refit.
  auto labels = dataset_labels(ds);
  auto folds = stratified_kfold(labels, eval_cfg.k, eval_cfg.shuffle_seed);
  Dataset mutated = ds;
  for (std::size_t i = 0; i < mutated.segments.size(); ++i)
    if (folds[i] == 0)
      for (std::size_t t = 0; t < mutated.segments[i].samples.rows(); ++t)
        for (std::size_t j = 0; j < mutated.segments[i].samples.cols(); ++j)
          mutated.segments[i].samples(t, j) = 1e6 + double(t) * double(j);

  auto mutated_prints = fold_fit_fingerprints(mutated, specs, pipeline, eval_cfg);
  REQUIRE(baseline_prints.size() == mutated_prints.size());
  CHECK(baseline_prints[0] == mutated_prints[0]);  // fold 0 trains on folds 1..4
}

TEST_CASE("failed cells abort with coordinates") {
  Dataset ds = synth_dataset(small_synth(), 31);
  EvalConfig eval_cfg;
  PipelineConfig pipeline;
  std::vector<ModelSpec> specs{ModelSpec{}};
  specs[0].family = ModelFamily::Knn;
  specs[0].knn.k = 0;  // invalid: fit throws
  specs[0].id = "bad_knn";
  try {
    run_baseline(ds, specs, pipeline, eval_cfg);
    FAIL("expected fit error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("bad_knn") != std::string::npos);
    CHECK(std::string(e.what()).find("fold") != std::string::npos);
  }
}

TEST_CASE("holdout mode evaluates on a single stratified split") {
  Dataset ds = synth_dataset(small_synth(), 4242);
  EvalConfig eval_cfg;
  eval_cfg.mode = EvalMode::Holdout;
  eval_cfg.holdout_fraction = 0.25;
  eval_cfg.shuffle_seed = 6;
  PipelineConfig pipeline;
  NoisePlan plan;
  plan.trials = 2;
  plan.master_seed = 13;
  RobustnessReport report = run_sweep(ds, fast_specs(), {20.0}, plan, pipeline, eval_cfg);
  REQUIRE(report.baseline.size() == 5);
  for (const auto& cell : report.baseline) {
    // Mechanics under test, not model quality: the reduced-epoch specs see
    // one 75% train split here instead of the k-fold rotations.
    CHECK(cell.clean_accuracy >= 0.8);
    CHECK(cell.noisy_accuracy_std == 0.0);  // single fold
  }
  // Same seed reproduces; different shuffle seed moves the split.
  RobustnessReport again = run_sweep(ds, fast_specs(), {20.0}, plan, pipeline, eval_cfg);
  CHECK(again.baseline[0].clean_accuracy == report.baseline[0].clean_accuracy);
}

TEST_CASE("pca pipeline plugs into eval for the pca-flagged specs") {
  Dataset ds = synth_dataset(small_synth(), 909);
  EvalConfig eval_cfg;
  eval_cfg.shuffle_seed = 8;
  PipelineConfig pipeline;
  pipeline.pca.variance_target = 0.9;

  std::vector<ModelSpec> specs;
  ModelSpec knn;
  knn.family = ModelFamily::Knn;
  knn.use_pca = true;
  knn.id = "knn_pca";
  specs.push_back(knn);
  auto cells = run_baseline(ds, specs, pipeline, eval_cfg);
  CHECK(cells[0].clean_accuracy >= 0.95);
}
