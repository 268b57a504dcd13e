#include "noisebench/report.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>

#include "noisebench/error.hpp"

namespace noisebench {

namespace {

using nlohmann::ordered_json;

// Exact positive powers of ten (all representable).
double pow10_exact(int e) {
  static const double table[] = {1e0,  1e1,  1e2,  1e3,  1e4,  1e5,  1e6,  1e7,
                                 1e8,  1e9,  1e10, 1e11, 1e12, 1e13, 1e14, 1e15,
                                 1e16, 1e17, 1e18, 1e19, 1e20, 1e21, 1e22};
  return table[e];
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_number(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  std::string out = buf;
  if (out == "-0.00") out = "0.00";
  return out;
}

ordered_json cell_to_json(const CellResult& cell, bool with_snr) {
  ordered_json j;
  j["model"] = cell.model_id;
  if (with_snr) j["snr_db"] = round_significant(*cell.snr_db, 6);
  j["clean_accuracy"] = round_significant(cell.clean_accuracy, 6);
  j["noisy_accuracy_mean"] = round_significant(cell.noisy_accuracy_mean, 6);
  j["noisy_accuracy_std"] = round_significant(cell.noisy_accuracy_std, 6);
  j["loss_pp"] = round_significant(cell.loss_pp, 6);
  return j;
}

std::uint64_t fnv_string(std::uint64_t h, const std::string& s) {
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

double round_significant(double v, int digits) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  int e = static_cast<int>(std::floor(std::log10(std::fabs(v))));
  int shift = digits - 1 - e;
  if (shift >= 0) {
    if (shift > 22) return v;  // below representable rounding scale
    double scale = pow10_exact(shift);
    return std::round(v * scale) / scale;
  }
  if (-shift > 22) return v;
  double scale = pow10_exact(-shift);
  return std::round(v / scale) * scale;
}

ReportDocument build_report_document(const RobustnessReport& report,
                                     const std::string& timestamp) {
  ReportDocument doc;

  ordered_json config = ordered_json::object();
  if (!report.resolved_config_json.empty()) {
    config = ordered_json::parse(report.resolved_config_json);
  }

  ordered_json body;
  body["schema_version"] = 1;
  // Run id from the deterministic content, so identical runs share it.
  std::uint64_t id = 0xCBF29CE484222325ULL;
  id = fnv_string(id, std::to_string(report.master_seed));
  id = fnv_string(id, hex64(report.data_checksum));
  id = fnv_string(id, config.dump());
  body["run_id"] = hex64(id);
  body["master_seed"] = report.master_seed;
  body["config"] = config;
  body["dataset"] = {{"checksum", hex64(report.data_checksum)},
                     {"segments", report.n_segments},
                     {"channels", report.n_channels},
                     {"classes", report.n_classes}};
  ordered_json grid = ordered_json::array();
  for (double s : report.snr_grid) grid.push_back(round_significant(s, 6));
  body["snr_grid"] = std::move(grid);

  ordered_json baseline = ordered_json::array();
  for (const CellResult& cell : report.baseline) baseline.push_back(cell_to_json(cell, false));
  body["baseline"] = std::move(baseline);

  ordered_json sweep = ordered_json::array();
  for (const CellResult& cell : report.sweep) sweep.push_back(cell_to_json(cell, true));
  body["sweep"] = std::move(sweep);

  ordered_json timing_baseline = ordered_json::array();
  for (const CellResult& cell : report.baseline)
    timing_baseline.push_back({{"model", cell.model_id}, {"seconds", cell.wall_seconds}});
  ordered_json timing_sweep = ordered_json::array();
  for (const CellResult& cell : report.sweep)
    timing_sweep.push_back(
        {{"model", cell.model_id}, {"snr_db", *cell.snr_db}, {"seconds", cell.wall_seconds}});

  doc.header["timestamp"] = timestamp;
  doc.header["toolkit_version"] = kToolkitVersion;
  doc.header["timing"] = {{"baseline", std::move(timing_baseline)},
                          {"sweep", std::move(timing_sweep)}};
  doc.body = std::move(body);
  return doc;
}

std::string emit_json(const ReportDocument& doc) {
  ordered_json root;
  root["header"] = doc.header;
  root["body"] = doc.body;
  return root.dump(2) + "\n";
}

std::string emit_json(const RobustnessReport& report, const std::string& timestamp) {
  return emit_json(build_report_document(report, timestamp));
}

ReportDocument parse_report_json(const std::string& text) {
  ordered_json root = ordered_json::parse(text);
  if (!root.contains("header") || !root.contains("body"))
    throw parse_error("report document: missing header or body");
  ReportDocument doc;
  doc.header = root["header"];
  doc.body = root["body"];
  return doc;
}

std::string emit_table3_csv(const ReportDocument& doc) {
  const auto& body = doc.body;
  const auto& grid = body.at("snr_grid");
  const auto& sweep = body.at("sweep");
  if (grid.empty() || sweep.empty())
    throw structure_error("table3 csv: report has no sweep data");

  std::string out = "model";
  for (const auto& s : grid) out += "," + format_number(s.get<double>(), "%g") + "dB";
  out += "\n";

  for (const auto& base : body.at("baseline")) {
    const std::string model = base.at("model").get<std::string>();
    out += model;
    for (const auto& s : grid) {
      const double snr = s.get<double>();
      bool found = false;
      for (const auto& cell : sweep) {
        if (cell.at("model").get<std::string>() == model &&
            cell.at("snr_db").get<double>() == snr) {
          out += "," + format_number(cell.at("loss_pp").get<double>(), "%.2f");
          found = true;
          break;
        }
      }
      if (!found)
        throw structure_error("table3 csv: missing cell (" + model + ", " +
                              format_number(snr, "%g") + " dB)");
    }
    out += "\n";
  }
  return out;
}

std::string emit_trend_csv(const ReportDocument& doc) {
  const auto& body = doc.body;
  const auto& sweep = body.at("sweep");
  if (sweep.empty()) throw structure_error("trend csv: report has no sweep data");

  std::string out = "snr_db,model,loss_pp\n";
  for (const auto& base : body.at("baseline")) {
    const std::string model = base.at("model").get<std::string>();
    // Collect this model's cells, SNR descending.
    std::vector<std::pair<double, double>> rows;
    for (const auto& cell : sweep)
      if (cell.at("model").get<std::string>() == model)
        rows.emplace_back(cell.at("snr_db").get<double>(), cell.at("loss_pp").get<double>());
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [snr, loss] : rows)
      out += format_number(snr, "%g") + "," + model + "," + format_number(loss, "%.6g") + "\n";
  }
  return out;
}

std::string emit_baseline_csv(const ReportDocument& doc) {
  std::string out = "model,clean_accuracy\n";
  for (const auto& base : doc.body.at("baseline"))
    out += base.at("model").get<std::string>() + "," +
           format_number(base.at("clean_accuracy").get<double>(), "%.6g") + "\n";
  return out;
}

nlohmann::ordered_json model_card_json(const Scaler& scaler, const PcaModel* pca) {
  ordered_json card;
  card["scaler"] = {{"means", scaler.means}, {"stds", scaler.stds}};
  if (pca != nullptr) {
    card["pca"] = {{"explained_variance_ratios", pca->explained_variance_ratios},
                   {"retained_k", pca->retained_k}};
  } else {
    card["pca"] = nullptr;
  }
  return card;
}

std::string validation_report_to_json(const ValidationReport& report) {
  ordered_json j;
  j["schema_version"] = 1;
  ordered_json checks = ordered_json::array();
  for (const ValidationCheck& check : report.checks) {
    ordered_json c;
    c["name"] = check.name;
    c["passed"] = check.passed;
    c["warning_only"] = check.warning_only;
    c["findings"] = check.findings;
    checks.push_back(std::move(c));
  }
  j["checks"] = std::move(checks);
  j["ok"] = report.all_passed();
  return j.dump(2) + "\n";
}

std::string current_timestamp_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace noisebench
