// Command-line front end: ingest/validate datasets, run clean baselines and
// SNR robustness sweeps, inject noise into single segments, synthesize
// fixture datasets. Exit codes: 0 success, 1 structural/configuration
// error, 2 validation failure.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "noisebench/error.hpp"
#include "noisebench/parallel.hpp"
#include "noisebench/report.hpp"
#include "noisebench/runconfig.hpp"
#include "noisebench/signal.hpp"

namespace fs = std::filesystem;
using namespace noisebench;

namespace {

struct GlobalOptions {
  bool seed_given = false;
  std::uint64_t seed = 0;
  unsigned jobs = default_jobs();
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw structure_error("cannot write " + path.string());
  out << content;
}

Matrix read_csv_matrix(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw structure_error("cannot open " + file.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      std::string field = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                      : comma - pos);
      try {
        row.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw parse_error(file.string() + ":" + std::to_string(line_no) +
                          ": non-numeric value '" + field + "'");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw parse_error(file.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(rows.front().size()) + " columns, found " +
                        std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw parse_error(file.string() + ": empty file");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows.front().size(); ++c) m(r, c) = rows[r][c];
  return m;
}

void write_csv_matrix(const fs::path& file, const Matrix& m) {
  std::ofstream out(file);
  if (!out) throw structure_error("cannot write " + file.string());
  char buf[64];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

void print_validation_report(const ValidationReport& report) {
  for (const auto& check : report.checks) {
    const char* status = check.passed ? "pass" : (check.warning_only ? "warn" : "FAIL");
    std::printf("  [%s] %s\n", status, check.name.c_str());
    for (const auto& finding : check.findings) std::printf("         %s\n", finding.c_str());
  }
}

int cmd_ingest(const std::string& root, bool check_only, bool as_json, const ShapeConfig& shape,
               unsigned jobs) {
  Dataset ds = load_activity_dataset(root, shape, jobs);
  ValidationReport report = validate_dataset(ds);
  if (as_json) {
    std::fputs(validation_report_to_json(report).c_str(), stdout);
    return report.all_passed() ? 0 : 2;
  }
  if (!check_only) {
    std::printf("loaded %zu segments, %zu channels, %d classes, checksum %016llx\n",
                ds.segments.size(), ds.n_channels(), ds.n_classes,
                static_cast<unsigned long long>(dataset_checksum(ds)));
  }
  print_validation_report(report);
  return report.all_passed() ? 0 : 2;
}

void write_pipeline_cards(const RunConfig& cfg, const Dataset& ds, const fs::path& out) {
  auto labels = dataset_labels(ds);
  auto splits = make_splits(labels, cfg.eval);
  bool any_pca = false;
  for (const auto& spec : cfg.models) any_pca = any_pca || spec.use_pca;

  nlohmann::ordered_json cards = nlohmann::ordered_json::array();
  for (std::size_t f = 0; f < splits.size(); ++f) {
    Matrix X_train = feature_matrix(ds, cfg.pipeline.features, splits[f].train);
    FittedPipeline plain = fit_pipeline(X_train, cfg.pipeline, false);
    nlohmann::ordered_json entry;
    entry["fold"] = f;
    entry["plain"] = model_card_json(plain.scaler, nullptr);
    if (any_pca) {
      FittedPipeline with_pca = fit_pipeline(X_train, cfg.pipeline, true);
      entry["with_pca"] = model_card_json(with_pca.scaler, &*with_pca.pca);
    }
    cards.push_back(std::move(entry));
  }
  write_file(out, cards.dump(2) + "\n");
}

RunConfig load_and_override(const std::string& config_path, const GlobalOptions& global,
                            const std::string& out_override) {
  RunConfig cfg = load_run_config(config_path);
  if (global.seed_given) {
    cfg.master_seed = global.seed;
    cfg.shuffle_seed_given = false;
    cfg.noise_seed_given = false;
    cfg.synth_seed_given = false;
    std::fill(cfg.model_seed_given.begin(), cfg.model_seed_given.end(), false);
    resolve_seeds(cfg);
  }
  if (!out_override.empty()) cfg.output_dir = out_override;
  return cfg;
}

void print_baseline_table(const ReportDocument& doc) {
  std::printf("%-12s %10s\n", "model", "accuracy");
  for (const auto& cell : doc.body.at("baseline"))
    std::printf("%-12s %9.2f%%\n", cell.at("model").get<std::string>().c_str(),
                100.0 * cell.at("clean_accuracy").get<double>());
}

void print_sweep_table(const ReportDocument& doc) {
  std::printf("%-12s", "model");
  for (const auto& s : doc.body.at("snr_grid")) std::printf(" %9gdB", s.get<double>());
  std::printf("\n");
  for (const auto& base : doc.body.at("baseline")) {
    const std::string model = base.at("model").get<std::string>();
    std::printf("%-12s", model.c_str());
    for (const auto& s : doc.body.at("snr_grid")) {
      for (const auto& cell : doc.body.at("sweep")) {
        if (cell.at("model").get<std::string>() == model &&
            cell.at("snr_db").get<double>() == s.get<double>()) {
          std::printf(" %+9.2f%%", cell.at("loss_pp").get<double>());
          break;
        }
      }
    }
    std::printf("\n");
  }
}

int cmd_baseline(const std::string& config_path, const GlobalOptions& global,
                 const std::string& out_override, bool cards) {
  RunConfig cfg = load_and_override(config_path, global, out_override);
  Dataset ds = load_config_dataset(cfg, global.jobs);

  RobustnessReport report =
      run_sweep(ds, cfg.models, {}, cfg.noise, cfg.pipeline, cfg.eval, global.jobs);
  report.resolved_config_json = resolved_config_json(cfg).dump();

  ReportDocument doc = build_report_document(report, current_timestamp_utc());
  doc.header["output_dir"] = cfg.output_dir;
  fs::create_directories(cfg.output_dir);
  write_file(fs::path(cfg.output_dir) / "report.json", emit_json(doc));
  write_file(fs::path(cfg.output_dir) / "baseline.csv", emit_baseline_csv(doc));
  if (cards) write_pipeline_cards(cfg, ds, fs::path(cfg.output_dir) / "cards.json");
  print_baseline_table(doc);
  return 0;
}

int cmd_sweep(const std::string& config_path, const GlobalOptions& global,
              const std::string& out_override, const std::vector<double>& snr_override,
              int trials_override, bool cards) {
  RunConfig cfg = load_and_override(config_path, global, out_override);
  if (!snr_override.empty()) cfg.snr_grid = snr_override;
  if (trials_override > 0) cfg.noise.trials = trials_override;
  Dataset ds = load_config_dataset(cfg, global.jobs);

  RobustnessReport report =
      run_sweep(ds, cfg.models, cfg.snr_grid, cfg.noise, cfg.pipeline, cfg.eval, global.jobs);
  report.resolved_config_json = resolved_config_json(cfg).dump();

  ReportDocument doc = build_report_document(report, current_timestamp_utc());
  doc.header["output_dir"] = cfg.output_dir;
  fs::create_directories(cfg.output_dir);
  write_file(fs::path(cfg.output_dir) / "report.json", emit_json(doc));
  write_file(fs::path(cfg.output_dir) / "table3.csv", emit_table3_csv(doc));
  write_file(fs::path(cfg.output_dir) / "trend.csv", emit_trend_csv(doc));
  if (cards) write_pipeline_cards(cfg, ds, fs::path(cfg.output_dir) / "cards.json");
  print_sweep_table(doc);
  return 0;
}

int cmd_inject(const std::string& in_file, double snr_db, std::uint64_t seed,
               const std::string& out_file, const std::string& hist_file, std::size_t bins) {
  Matrix samples = read_csv_matrix(in_file);
  Segment segment;
  segment.samples = samples;
  segment.label = 1;
  segment.subject = 1;
  segment.segment_index = 1;

  NoisePlan plan{snr_db, 1, seed};
  InjectResult result = inject(segment, 0, plan, 0);
  write_csv_matrix(out_file, result.segment.samples);

  for (std::size_t channel : result.zero_power_channels)
    std::fprintf(stderr, "warning: channel %zu has zero power, left unchanged\n", channel);

  if (!hist_file.empty()) {
    std::vector<double> noise;
    noise.reserve(samples.rows() * samples.cols());
    for (std::size_t c = 0; c < samples.cols(); ++c)
      for (std::size_t r = 0; r < samples.rows(); ++r)
        noise.push_back(result.segment.samples(r, c) - samples(r, c));
    write_file(hist_file, histogram_to_csv(noise_histogram(noise, bins)));
  }
  return 0;
}

int cmd_synth(const std::string& spec_file, const std::string& out_dir, std::uint64_t seed) {
  std::ifstream in(spec_file);
  if (!in) throw structure_error("cannot open spec file: " + spec_file);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error("spec " + spec_file + ": " + e.what());
  }
  SynthSpec spec;
  spec.n_classes = j.value("n_classes", spec.n_classes);
  spec.n_subjects = j.value("n_subjects", spec.n_subjects);
  spec.segments_per_cell = j.value("segments_per_cell", spec.segments_per_cell);
  spec.n_channels = j.value("n_channels", spec.n_channels);
  spec.n_samples = j.value("n_samples", spec.n_samples);
  spec.sample_rate_hz = j.value("sample_rate_hz", spec.sample_rate_hz);

  Dataset ds = synth_dataset(spec, seed);
  ShapeConfig shape{spec.n_classes, spec.n_subjects, spec.segments_per_cell, spec.n_samples,
                    spec.n_channels};
  write_dataset(ds, out_dir, shape);
  std::printf("wrote %zu segments under %s\n", ds.segments.size(), out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensor thermal-noise robustness benchmark for fusion classifiers"};
  app.set_version_flag("--version", std::string("noisebench ") + kToolkitVersion);
  app.require_subcommand(1);

  GlobalOptions global;
  auto* seed_opt = app.add_option("--seed", global.seed, "Master seed override");
  app.add_option("--jobs", global.jobs, "Worker threads (default: hardware)");

  auto* ingest = app.add_subcommand("ingest", "Load and validate a dataset tree");
  std::string root;
  const char* env_root = std::getenv(kDatasetRootEnvVar);
  if (env_root != nullptr) root = env_root;
  bool check_only = false;
  bool ingest_json = false;
  ShapeConfig shape;
  ingest->add_option("--root", root, "Dataset root directory");
  ingest->add_flag("--check-only", check_only, "Print only the validation checks");
  ingest->add_flag("--json", ingest_json, "Emit the validation report as JSON");
  ingest->add_option("--classes", shape.n_classes);
  ingest->add_option("--subjects", shape.n_subjects);
  ingest->add_option("--segments-per-cell", shape.segments_per_cell);
  ingest->add_option("--samples", shape.n_samples);
  ingest->add_option("--channels", shape.n_channels);

  auto* baseline = app.add_subcommand("baseline", "Clean cross-validated accuracies");
  std::string config_path, out_override;
  bool baseline_cards = false;
  baseline->add_option("--config", config_path, "Run config (JSON)")->required();
  baseline->add_option("--out", out_override, "Output directory override");
  baseline->add_flag("--cards", baseline_cards, "Also write per-fold pipeline cards.json");

  auto* sweep = app.add_subcommand("sweep", "SNR degradation sweep");
  std::string sweep_config, sweep_out;
  std::vector<double> snr_override;
  int trials_override = 0;
  sweep->add_option("--config", sweep_config, "Run config (JSON)")->required();
  sweep->add_option("--out", sweep_out, "Output directory override");
  bool sweep_cards = false;
  sweep->add_option("--snr", snr_override, "SNR grid override, dB")->delimiter(',');
  sweep->add_option("--trials", trials_override, "Noise trials per cell override");
  sweep->add_flag("--cards", sweep_cards, "Also write per-fold pipeline cards.json");

  auto* inject_cmd = app.add_subcommand("inject", "Inject noise into one segment CSV");
  std::string in_file, out_file, hist_file;
  double snr_db = 20.0;
  std::uint64_t inject_seed = 0;
  std::size_t bins = 50;
  inject_cmd->add_option("--in", in_file, "Input samples-x-channels CSV")->required();
  inject_cmd->add_option("--snr", snr_db, "Target SNR in dB")->required();
  inject_cmd->add_option("--seed", inject_seed, "Noise seed")->required();
  inject_cmd->add_option("--out", out_file, "Noisy output CSV")->required();
  inject_cmd->add_option("--hist", hist_file, "Optional noise histogram CSV");
  inject_cmd->add_option("--bins", bins, "Histogram bins");

  auto* synth = app.add_subcommand("synth", "Materialize a synthetic dataset tree");
  std::string synth_spec, synth_out;
  std::uint64_t synth_seed = 0;
  synth->add_option("--spec", synth_spec, "Synth spec (JSON)")->required();
  synth->add_option("--out", synth_out, "Output dataset root")->required();
  synth->add_option("--seed", synth_seed, "Generator seed")->required();

  CLI11_PARSE(app, argc, argv);
  global.seed_given = seed_opt->count() > 0;
  if (global.jobs == 0) global.jobs = 1;

  try {
    if (ingest->parsed()) {
      if (root.empty())
        throw config_error(std::string("no dataset root: pass --root or set ") +
                           kDatasetRootEnvVar);
      return cmd_ingest(root, check_only, ingest_json, shape, global.jobs);
    }
    if (baseline->parsed())
      return cmd_baseline(config_path, global, out_override, baseline_cards);
    if (sweep->parsed())
      return cmd_sweep(sweep_config, global, sweep_out, snr_override, trials_override,
                       sweep_cards);
    if (inject_cmd->parsed())
      return cmd_inject(in_file, snr_db, inject_seed, out_file, hist_file, bins);
    if (synth->parsed()) return cmd_synth(synth_spec, synth_out, synth_seed);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.kind() == ErrorKind::Validation ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
