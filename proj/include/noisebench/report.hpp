#pragma once

#include <string>

#include <json.hpp>

#include "noisebench/eval.hpp"
#include "noisebench/ingest.hpp"

namespace noisebench {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Serialized run: `body` is deterministic for identical (seed, config,
// dataset); `header` carries the timestamp and wall-clock timings and is
// excluded from the determinism contract. Floating-point body values are
// rounded to 6 significant digits when the document is built, so the
// document round-trips losslessly.
struct ReportDocument {
  nlohmann::ordered_json header;
  nlohmann::ordered_json body;

  bool operator==(const ReportDocument&) const = default;
};

ReportDocument build_report_document(const RobustnessReport& report, const std::string& timestamp);

std::string emit_json(const ReportDocument& doc);
std::string emit_json(const RobustnessReport& report, const std::string& timestamp);
ReportDocument parse_report_json(const std::string& text);

// Wide accuracy-drop table: one row per model,
// one loss_pp column per requested SNR (grid order), cells signed with two
// decimals. Requires a sweep; missing cells are structural errors.
std::string emit_table3_csv(const ReportDocument& doc);

// Long form (snr_db, model, loss_pp), models in report order, SNR descending.
std::string emit_trend_csv(const ReportDocument& doc);

// model,clean_accuracy rows in report order.
std::string emit_baseline_csv(const ReportDocument& doc);

// Reproducibility audit card for one fitted preprocessing pipeline:
// scaler means/stds plus PCA explained-variance ratios and retained_k.
nlohmann::ordered_json model_card_json(const Scaler& scaler, const PcaModel* pca);

// Nearest double to the decimal rounding of v at `digits` significant digits.
double round_significant(double v, int digits);

std::string validation_report_to_json(const ValidationReport& report);

std::string current_timestamp_utc();

}  // namespace noisebench
