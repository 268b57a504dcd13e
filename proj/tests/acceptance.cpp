// Acceptance suite: runs each release criterion at its pinned tolerance and
// prints one [PASS]/[FAIL]/[SKIP] line per criterion. Criteria that need
// the public 19-activity dataset are skipped unless NOISEBENCH_DATASET_ROOT
// points at it. Exit code is nonzero iff any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "noisebench/eval.hpp"
#include "noisebench/ingest.hpp"
#include "noisebench/models/mlp.hpp"
#include "noisebench/parallel.hpp"
#include "noisebench/report.hpp"
#include "noisebench/rng.hpp"
#include "noisebench/runconfig.hpp"
#include "noisebench/signal.hpp"

using namespace noisebench;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool ran = false;
  bool passed = false;
  std::string detail;
};

Outcome pass(std::string detail) { return {true, true, std::move(detail)}; }
Outcome fail(std::string detail) { return {true, false, std::move(detail)}; }

// ---- criterion 1: SNR calibration --------------------------------------

Outcome criterion_snr_calibration() {
  auto start = Clock::now();
  Segment seg;
  seg.samples = Matrix(125, 1);
  for (std::size_t t = 0; t < 125; ++t)
    seg.samples(t, 0) =
        std::sin(2.0 * std::numbers::pi * 2.0 * static_cast<double>(t) / 25.0) + 0.3;

  std::vector<double> clean(125);
  for (std::size_t t = 0; t < 125; ++t) clean[t] = seg.samples(t, 0);

  std::string detail;
  for (double target : {40.0, 30.0, 20.0, 10.0, 5.0, 0.0}) {
    NoisePlan plan{target, 1, 20260808};
    double total = 0.0;
    int outliers = 0;
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
      InjectResult result = inject(seg, static_cast<std::size_t>(i), plan, 0);
      std::vector<double> noisy(125);
      for (std::size_t t = 0; t < 125; ++t) noisy[t] = result.segment.samples(t, 0);
      double measured = measure_snr(clean, noisy);
      total += measured;
      if (std::fabs(measured - target) > 2.0) ++outliers;
    }
    double mean_err = std::fabs(total / n - target);
    if (mean_err > 0.1)
      return fail("target " + std::to_string(target) + " dB: mean off by " +
                  std::to_string(mean_err) + " dB (limit 0.1)");
    if (outliers > 10)
      return fail("target " + std::to_string(target) + " dB: " + std::to_string(outliers) +
                  "/1000 channels beyond 2 dB (limit 10)");
    detail += (detail.empty() ? "" : ", ") +
              std::to_string(target).substr(0, std::to_string(target).find('.')) + "dB|" +
              std::to_string(mean_err).substr(0, 6);
  }
  double elapsed = seconds_since(start);
  if (elapsed >= 10.0) return fail("runtime " + std::to_string(elapsed) + " s (limit 10)");
  return pass("mean errors (dB): " + detail + "; " + std::to_string(elapsed).substr(0, 5) + " s");
}

// ---- shared synthetic material ------------------------------------------

SynthSpec acceptance_synth() {
  SynthSpec spec;
  spec.n_classes = 4;
  spec.n_subjects = 2;
  spec.segments_per_cell = 25;
  spec.n_channels = 9;
  spec.n_samples = 50;
  return spec;
}

std::vector<ModelSpec> seeded_default_specs() {
  std::vector<ModelSpec> specs = default_model_specs();
  for (std::size_t i = 0; i < specs.size(); ++i)
    specs[i].seed = mix64_seq({20260808, 0x4143'4345'5054ULL, i});
  return specs;
}

struct SyntheticRuns {
  std::vector<CellResult> baseline;
  RobustnessReport grid_sweep;  // {40,30,20,10,5} dB
};

SyntheticRuns run_synthetic(unsigned jobs) {
  Dataset ds = synth_dataset(acceptance_synth(), 20260808);
  EvalConfig eval_cfg;
  eval_cfg.shuffle_seed = mix64_seq({20260808, 1});
  PipelineConfig pipeline;
  NoisePlan plan;
  plan.trials = 5;
  plan.master_seed = mix64_seq({20260808, 2});
  SyntheticRuns runs;
  runs.grid_sweep = run_sweep(ds, seeded_default_specs(), {40.0, 30.0, 20.0, 10.0, 5.0}, plan,
                              pipeline, eval_cfg, jobs);
  runs.baseline = runs.grid_sweep.baseline;
  return runs;
}

// ---- criterion 4: monotonic degradation ----------------------------------

Outcome criterion_monotonic(const SyntheticRuns& runs) {
  const auto& report = runs.grid_sweep;
  const std::size_t n_snrs = report.snr_grid.size();
  for (std::size_t m = 0; m < report.baseline.size(); ++m) {
    for (std::size_t s = 1; s < n_snrs; ++s) {
      const CellResult& easier = report.sweep[m * n_snrs + s - 1];
      const CellResult& harder = report.sweep[m * n_snrs + s];
      if (harder.noisy_accuracy_mean > easier.noisy_accuracy_mean + 0.01)
        return fail("model " + harder.model_id + ": accuracy rose by " +
                    std::to_string(100.0 * (harder.noisy_accuracy_mean -
                                            easier.noisy_accuracy_mean)) +
                    " pp from " + std::to_string(*easier.snr_db) + " to " +
                    std::to_string(*harder.snr_db) + " dB (tolerance 1.0)");
    }
  }
  return pass("non-increasing across {40,30,20,10,5} dB within 1.0 pp for all 5 models");
}

// ---- criterion 5: determinism via the CLI ---------------------------------

int run_cli(const std::string& args) {
  std::string cmd = std::string(NB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion_determinism() {
  fs::path dir = fs::temp_directory_path() /
                 ("noisebench_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);

  std::string config = R"({
    "seed": 20260808,
    "data": {"synth": {"n_classes": 3, "n_subjects": 2, "segments_per_cell": 10,
                       "n_channels": 6, "n_samples": 40}},
    "models": [
      {"family": "mlp", "id": "dnn", "epochs": 8, "hidden_layers": [32, 16]},
      {"family": "tree", "id": "dtc_pca"},
      {"family": "forest", "id": "rfc", "n_trees": 25},
      {"family": "knn", "id": "knn_pca"},
      {"family": "gnb", "id": "gnb"}
    ],
    "eval": {"k": 4},
    "noise": {"snr_grid": [30, 10], "trials": 2},
    "output_dir": ")" + (dir / "a").string() + R"("
  })";
  std::ofstream(dir / "cfg.json") << config;

  if (run_cli("--jobs 1 sweep --config " + (dir / "cfg.json").string()) != 0) {
    fs::remove_all(dir);
    return fail("first cmd_sweep run failed");
  }
  if (run_cli("--jobs 4 sweep --config " + (dir / "cfg.json").string() + " --out " +
              (dir / "b").string()) != 0) {
    fs::remove_all(dir);
    return fail("second cmd_sweep run failed");
  }

  ReportDocument a = parse_report_json(slurp(dir / "a" / "report.json"));
  ReportDocument b = parse_report_json(slurp(dir / "b" / "report.json"));
  std::string body_a = a.body.dump();
  std::string body_b = b.body.dump();
  fs::remove_all(dir);
  if (body_a != body_b) return fail("report bodies differ between --jobs 1 and --jobs 4");
  return pass("report bodies byte-identical across reruns and --jobs 1/4");
}

// ---- criterion 6: numerical oracles ---------------------------------------

std::vector<int> gnb_brute_force(const Matrix& X_train, const std::vector<int>& y_train,
                                 int n_classes, double floor_scale, const Matrix& X_test) {
  const std::size_t n = X_train.rows(), d = X_train.cols();
  std::vector<double> gm(d, 0.0), gv(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) gm[j] += X_train(i, j);
  for (auto& v : gm) v /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double diff = X_train(i, j) - gm[j];
      gv[j] += diff * diff;
    }
  double max_var = 0.0;
  for (auto& v : gv) max_var = std::max(max_var, v / static_cast<double>(n));
  double floor = std::max(floor_scale * max_var, 1e-300);

  std::vector<std::vector<double>> mu(static_cast<std::size_t>(n_classes),
                                      std::vector<double>(d, 0.0));
  std::vector<std::vector<double>> var(static_cast<std::size_t>(n_classes),
                                       std::vector<double>(d, 0.0));
  std::vector<double> count(static_cast<std::size_t>(n_classes), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto c = static_cast<std::size_t>(y_train[i] - 1);
    count[c] += 1.0;
    for (std::size_t j = 0; j < d; ++j) mu[c][j] += X_train(i, j);
  }
  for (std::size_t c = 0; c < mu.size(); ++c)
    for (std::size_t j = 0; j < d; ++j) mu[c][j] /= count[c];
  for (std::size_t i = 0; i < n; ++i) {
    auto c = static_cast<std::size_t>(y_train[i] - 1);
    for (std::size_t j = 0; j < d; ++j) {
      double diff = X_train(i, j) - mu[c][j];
      var[c][j] += diff * diff;
    }
  }
  for (std::size_t c = 0; c < var.size(); ++c)
    for (std::size_t j = 0; j < d; ++j)
      var[c][j] = std::max(var[c][j] / count[c], floor);

  std::vector<int> out;
  for (std::size_t i = 0; i < X_test.rows(); ++i) {
    int best = 1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 1; c <= n_classes; ++c) {
      auto cc = static_cast<std::size_t>(c - 1);
      double score = std::log(count[cc] / static_cast<double>(n));
      for (std::size_t j = 0; j < d; ++j) {
        double diff = X_test(i, j) - mu[cc][j];
        score +=
            -0.5 * (std::log(2.0 * std::numbers::pi * var[cc][j]) + diff * diff / var[cc][j]);
      }
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    out.push_back(best);
  }
  return out;
}

Outcome criterion_oracles() {
  // MLP gradients against central finite differences.
  {
    Rng rng(424242);
    Matrix X(14, 8);
    std::vector<int> y(14);
    for (std::size_t i = 0; i < 14; ++i) {
      y[i] = 1 + static_cast<int>(i % 3);
      for (std::size_t j = 0; j < 8; ++j) X(i, j) = rng.next_gaussian();
    }
    double err = mlp_gradient_check({8, 6, 5, 3}, X, y, 777);
    if (err >= 1e-4)
      return fail("mlp gradient check: max relative error " + std::to_string(err) +
                  " (limit 1e-4)");
  }

  // GNB against an independent brute-force argmax, 100 seeds.
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng(seed);
    const int n_classes = 2 + static_cast<int>(rng.next_below(3));
    const std::size_t d = 1 + rng.next_below(5);
    const std::size_t n =
        static_cast<std::size_t>(n_classes) * (2 + rng.next_below(50 / 5));
    Matrix X(n, d);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = 1 + static_cast<int>(i) % n_classes;
      for (std::size_t j = 0; j < d; ++j)
        X(i, j) = rng.next_gaussian() * (1.0 + static_cast<double>(j)) + 2.0 * y[i];
    }
    Matrix X_test(20, d);
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t j = 0; j < d; ++j) X_test(i, j) = rng.next_range(-2.0, 12.0);
    ModelSpec spec;
    spec.family = ModelFamily::Gnb;
    auto model = fit_model(spec, X, y, n_classes);
    if (model->predict(X_test) !=
        gnb_brute_force(X, y, n_classes, spec.gnb.variance_floor_scale, X_test))
      return fail("gnb mismatch vs brute-force log-likelihood argmax at seed " +
                  std::to_string(seed));
  }

  // PCA orthonormality and full-basis reconstruction.
  {
    Rng rng(31415);
    Matrix X(40, 12);
    for (std::size_t i = 0; i < 40; ++i)
      for (std::size_t j = 0; j < 12; ++j) X(i, j) = rng.next_gaussian();
    PcaModel m = pca_fit(X, 1.0);
    if (m.retained_k != 12)
      return fail("pca full-basis fit retained " + std::to_string(m.retained_k) + " of 12");
    for (std::size_t a = 0; a < m.retained_k; ++a)
      for (std::size_t b = 0; b < m.retained_k; ++b) {
        double dot = 0.0;
        for (std::size_t j = 0; j < 12; ++j) dot += m.components(a, j) * m.components(b, j);
        double expected = a == b ? 1.0 : 0.0;
        if (std::fabs(dot - expected) > 1e-8)
          return fail("pca components not orthonormal to 1e-8");
      }
    Matrix recon = pca_reconstruct(m, pca_apply(m, X));
    for (std::size_t i = 0; i < 40; ++i)
      for (std::size_t j = 0; j < 12; ++j)
        if (std::fabs(recon(i, j) - X(i, j)) > 1e-8)
          return fail("pca full-basis reconstruction error above 1e-8");
  }
  return pass("mlp grad < 1e-4; gnb == brute force on 100 seeds; pca orthonormal + exact recon");
}

// ---- criterion 7 extras: synthetic separability + 40 dB ------------------

Outcome criterion_separability(const SyntheticRuns& runs) {
  for (const CellResult& cell : runs.baseline)
    if (cell.clean_accuracy < 0.95)
      return fail("model " + cell.model_id + " clean accuracy " +
                  std::to_string(cell.clean_accuracy) + " below 0.95");
  const std::size_t n_snrs = runs.grid_sweep.snr_grid.size();
  for (std::size_t m = 0; m < runs.baseline.size(); ++m) {
    const CellResult& cell = runs.grid_sweep.sweep[m * n_snrs];  // 40 dB column
    if (std::fabs(cell.loss_pp) > 1.0)
      return fail("model " + cell.model_id + " |loss| at 40 dB is " +
                  std::to_string(std::fabs(cell.loss_pp)) + " pp (limit 1.0)");
  }
  return pass("all 5 models >= 0.95 clean; |loss| at 40 dB <= 1.0 pp");
}

// ---- criterion 8: leakage guard -------------------------------------------

Outcome criterion_leakage() {
  SynthSpec spec;
  spec.n_classes = 3;
  spec.n_subjects = 2;
  spec.segments_per_cell = 10;
  spec.n_channels = 6;
  spec.n_samples = 40;
  Dataset ds = synth_dataset(spec, 515151);
  EvalConfig eval_cfg;
  eval_cfg.k = 4;
  eval_cfg.shuffle_seed = 2;
  PipelineConfig pipeline;
  std::vector<ModelSpec> specs = seeded_default_specs();
  for (auto& s : specs) {
    s.mlp.epochs = 8;
    s.mlp.hidden_layers = {32, 16};
    s.forest.n_trees = 25;
  }

  auto before = fold_fit_fingerprints(ds, specs, pipeline, eval_cfg);

  auto labels = dataset_labels(ds);
  auto folds = stratified_kfold(labels, eval_cfg.k, eval_cfg.shuffle_seed);
  Dataset mutated = ds;
  for (std::size_t i = 0; i < mutated.segments.size(); ++i)
    if (folds[i] == 1)
      for (std::size_t t = 0; t < mutated.segments[i].samples.rows(); ++t)
        for (std::size_t j = 0; j < mutated.segments[i].samples.cols(); ++j)
          mutated.segments[i].samples(t, j) = -4321.0 + static_cast<double>(t + j);

  auto after = fold_fit_fingerprints(mutated, specs, pipeline, eval_cfg);
  if (before.size() != after.size()) return fail("fold count changed");
  if (before[1] != after[1])
    return fail("fold 1 fitted parameters changed when its validation data was mutated");
  return pass("validation-fold mutation left fitted scaler/pca/model bytes unchanged");
}

// ---- criteria 2 and 3: public dataset -------------------------------------

struct PublicRuns {
  bool attempted = false;
  std::string load_error;
  std::vector<CellResult> baseline;
  RobustnessReport sweep;
  double baseline_seconds = 0.0;  // baseline phase alone; the 30-min budget
};

PublicRuns run_public(const char* root, unsigned jobs) {
  PublicRuns runs;
  runs.attempted = true;
  try {
    Dataset ds = load_activity_dataset(root, ShapeConfig{}, jobs);
    ValidationReport validation = validate_dataset(ds);
    if (!validation.all_passed()) {
      runs.load_error = "dataset failed validation";
      return runs;
    }
    EvalConfig eval_cfg;
    eval_cfg.shuffle_seed = mix64_seq({20260808, 3});
    PipelineConfig pipeline;
    NoisePlan plan;
    plan.trials = 5;
    plan.master_seed = mix64_seq({20260808, 4});
    auto start = Clock::now();
    runs.baseline = run_baseline(ds, seeded_default_specs(), pipeline, eval_cfg, jobs);
    runs.baseline_seconds = seconds_since(start);
    runs.sweep = run_sweep(ds, seeded_default_specs(), {40.0, 30.0, 20.0, 10.0, 5.0}, plan,
                           pipeline, eval_cfg, jobs);
  } catch (const std::exception& e) {
    runs.load_error = e.what();
  }
  return runs;
}

double cell_value(const std::vector<CellResult>& cells, const std::string& id) {
  for (const auto& cell : cells)
    if (cell.model_id == id) return cell.clean_accuracy;
  return -1.0;
}

Outcome criterion_baseline_plausibility(const PublicRuns& runs) {
  if (!runs.load_error.empty()) return fail("public dataset run failed: " + runs.load_error);
  struct Bound {
    const char* id;
    double minimum;
  };
  // Paper values: 99.21 / 90.98 / 98.74 / 98.02 / 93.24 percent.
  for (const Bound& bound : {Bound{"dnn", 0.97}, Bound{"rfc", 0.95}, Bound{"knn_pca", 0.95},
                             Bound{"gnb", 0.85}, Bound{"dtc_pca", 0.80}}) {
    double acc = cell_value(runs.baseline, bound.id);
    if (acc < bound.minimum)
      return fail(std::string(bound.id) + " accuracy " + std::to_string(acc) + " below " +
                  std::to_string(bound.minimum));
  }
  if (runs.baseline_seconds > 1800.0)
    return fail("baseline took " + std::to_string(runs.baseline_seconds) + " s (limit 1800)");
  std::string detail;
  for (const auto& cell : runs.baseline)
    detail += cell.model_id + "=" + std::to_string(cell.clean_accuracy).substr(0, 6) + " ";
  return pass(detail);
}

double loss_at(const RobustnessReport& report, const std::string& id, double snr) {
  for (const auto& cell : report.sweep)
    if (cell.model_id == id && cell.snr_db && *cell.snr_db == snr) return cell.loss_pp;
  return std::numeric_limits<double>::quiet_NaN();
}

Outcome criterion_table3(const PublicRuns& runs) {
  if (!runs.load_error.empty()) return fail("public dataset run failed: " + runs.load_error);
  const RobustnessReport& report = runs.sweep;
  for (const char* resilient : {"dnn", "knn_pca"}) {
    double own = std::fabs(loss_at(report, resilient, 5.0));
    for (const char* fragile : {"dtc_pca", "rfc", "gnb"}) {
      double other = std::fabs(loss_at(report, fragile, 5.0));
      if (!(own < other))
        return fail(std::string(resilient) + " |loss| " + std::to_string(own) +
                    " not strictly below " + fragile + " |loss| " + std::to_string(other) +
                    " at 5 dB");
    }
  }
  for (const auto& cell : report.sweep)
    if (cell.snr_db && *cell.snr_db == 40.0 && std::fabs(cell.loss_pp) > 2.0)
      return fail(cell.model_id + " |loss| at 40 dB is " + std::to_string(cell.loss_pp) +
                  " pp (limit 2.0)");
  return pass("dnn/knn_pca strictly more resilient at 5 dB; all |loss| <= 2.0 pp at 40 dB");
}

}  // namespace

int main() {
  unsigned jobs = default_jobs();
  const char* dataset_root = std::getenv(kDatasetRootEnvVar);
  bool have_dataset = dataset_root != nullptr && *dataset_root != '\0' &&
                      fs::is_directory(dataset_root);

  struct Line {
    int number;
    const char* name;
    Outcome outcome;
  };
  std::vector<Line> lines;

  auto dataset_free_start = Clock::now();

  lines.push_back({1, "SNR calibration", criterion_snr_calibration()});

  SyntheticRuns synthetic = run_synthetic(jobs);
  Outcome monotonic = criterion_monotonic(synthetic);
  Outcome determinism = criterion_determinism();
  Outcome oracles = criterion_oracles();
  Outcome separability = criterion_separability(synthetic);
  Outcome leakage = criterion_leakage();
  double dataset_free_seconds = seconds_since(dataset_free_start);

  if (have_dataset) {
    PublicRuns public_runs = run_public(dataset_root, jobs);
    lines.push_back({2, "baseline plausibility (public dataset)",
                     criterion_baseline_plausibility(public_runs)});
    lines.push_back({3, "qualitative Table-3 reproduction", criterion_table3(public_runs)});
  } else {
    Outcome skip;  // ran = false
    skip.detail = std::string("public dataset not present; set ") + kDatasetRootEnvVar;
    lines.push_back({2, "baseline plausibility (public dataset)", skip});
    lines.push_back({3, "qualitative Table-3 reproduction", skip});
  }

  lines.push_back({4, "monotonic degradation", monotonic});
  lines.push_back({5, "determinism across runs and --jobs", determinism});
  lines.push_back({6, "numerical oracles (mlp/gnb/pca)", oracles});

  Outcome runnability;
  if (lines[0].outcome.passed && monotonic.passed && determinism.passed && oracles.passed &&
      separability.passed) {
    if (dataset_free_seconds < 300.0)
      runnability = pass("criteria 1/4/5/6 + separability in " +
                         std::to_string(dataset_free_seconds).substr(0, 6) + " s; " +
                         separability.detail);
    else
      runnability = fail("dataset-free checks took " + std::to_string(dataset_free_seconds) +
                         " s (limit 300)");
  } else {
    runnability =
        fail(separability.passed ? "a dataset-free criterion failed" : separability.detail);
  }
  lines.push_back({7, "dataset-free runnability", runnability});
  lines.push_back({8, "leakage guard", leakage});

  std::sort(lines.begin(), lines.end(),
            [](const Line& a, const Line& b) { return a.number < b.number; });

  bool any_failed = false;
  for (const Line& line : lines) {
    const char* tag = line.outcome.ran ? (line.outcome.passed ? "PASS" : "FAIL") : "SKIP";
    if (line.outcome.ran && !line.outcome.passed) any_failed = true;
    std::printf("[%s] criterion %d: %s :: %s\n", tag, line.number, line.name,
                line.outcome.detail.c_str());
  }
  return any_failed ? 1 : 0;
}
