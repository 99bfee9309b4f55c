#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "screeneval/bootstrap.hpp"
#include "screeneval/calibration.hpp"
#include "screeneval/dataset.hpp"
#include "screeneval/metrics.hpp"

namespace screeneval {

inline constexpr const char* kTotalScope = "Total";

/// A (level, strategy) combination to report.
struct Selection {
  Level level = Level::image;
  std::optional<VoteStrategy> strategy;

  bool operator==(const Selection&) const = default;
};

struct ReportOptions {
  /// Records outside this split are ignored. nullopt keeps every split.
  std::optional<Split> split = Split::test;
  /// Cohort scopes to report; empty means every cohort in the data, in
  /// order of first appearance. "Total" is always appended and pools all
  /// records of the split.
  std::vector<std::string> cohorts;
  /// Empty means every artifact available, in the order image, max, mean.
  std::vector<Selection> selections;
};

struct ReportRow {
  std::string scope;
  Selection selection;
  DecisionRule rule;
  std::size_t images = 0;
  std::size_t subjects = 0;
  ConfusionMatrix counts;
  /// One interval per entry of kAllMetrics; empty when not computable.
  std::vector<IntervalEstimate> metrics;
  std::string notice;

  bool computable() const noexcept { return !metrics.empty(); }
  const IntervalEstimate& metric(Metric m) const;
};

struct PerformanceReport {
  std::vector<ReportRow> rows;
  std::vector<CalibrationArtifact> artifacts;  ///< thresholds used, in selection order
  BootstrapConfig bootstrap;
  std::string provenance;
  std::vector<std::string> notices;
};

/// For every scope and selection: AUC from scores, threshold metrics at the
/// calibrated operating point, each with a bootstrap interval. A scope with
/// one class present becomes a row marked not computable.
PerformanceReport build_performance_report(const Dataset& test, const ArtifactSet& artifacts,
                                           const BootstrapConfig& cfg, const ReportOptions& options = {});

nlohmann::json to_json(const PerformanceReport& report);
/// Canonical bytes: to_json(report).dump(2) plus a trailing newline.
std::string serialize(const PerformanceReport& report);
std::string render_text(const PerformanceReport& report);

struct ConfusionRow {
  std::string scope;
  Selection selection;
  ConfusionMatrix counts;
  // Class-normalised percentages, one decimal. nullopt when the class is absent.
  std::optional<double> tp_pct, fn_pct, fp_pct, tn_pct;
};

struct ConfusionReport {
  std::vector<ConfusionRow> rows;
  std::vector<std::string> notices;
};

ConfusionReport build_confusion_report(const Dataset& test, const ArtifactSet& artifacts,
                                       const ReportOptions& options = {});
nlohmann::json to_json(const ConfusionReport& report);
std::string render_text(const ConfusionReport& report);

struct RocExport {
  RocCurve curve;
  std::string csv;
  std::string svg;
};

/// ROC of one slice as CSV and an SVG plot (unit square, diagonal reference,
/// AUC annotation). Throws when the slice has a single class.
RocExport export_roc(const Dataset& test, Level level, std::optional<VoteStrategy> strategy,
                     const GroupFilter& filter = {});

std::string render_roc_svg(const RocCurve& curve, const std::string& title);

}  // namespace screeneval
