#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace screeneval {

/// A score paired with its ground-truth label (1 positive, 0 negative).
struct Scored {
  double score = 0.0;
  int label = 0;
};

/// ge: positive iff score >= threshold (default); gt: positive iff score > threshold.
enum class ThresholdMode { ge, gt };

std::string_view to_string(ThresholdMode mode);
std::optional<ThresholdMode> parse_threshold_mode(std::string_view text);

struct DecisionRule {
  double threshold = 0.5;
  ThresholdMode mode = ThresholdMode::ge;

  bool positive(double score) const noexcept {
    return mode == ThresholdMode::ge ? score >= threshold : score > threshold;
  }
};

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fn = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;

  std::uint64_t positives() const noexcept { return tp + fn; }
  std::uint64_t negatives() const noexcept { return fp + tn; }
  std::uint64_t total() const noexcept { return tp + fn + fp + tn; }

  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion_at(std::span<const Scored> scored, const DecisionRule& rule);
inline ConfusionMatrix confusion_at(std::span<const Scored> scored, double threshold) {
  return confusion_at(scored, DecisionRule{threshold, ThresholdMode::ge});
}

/// Same tally with each item counted `weights[i]` times. Zero-weight items
/// are skipped; an all-zero weight vector yields an empty matrix.
ConfusionMatrix confusion_weighted(std::span<const Scored> scored, std::span<const std::uint32_t> weights,
                                   const DecisionRule& rule);

struct MetricSet {
  double sensitivity = 0.0;
  double specificity = 0.0;
  double accuracy = 0.0;
  double f1 = 0.0;
  std::optional<double> precision;  ///< absent when nothing is predicted positive
};

/// Requires both classes; throws Error(undefined_metric) otherwise. F1 is 0
/// when its denominator is 0.
MetricSet metrics_from_confusion(const ConfusionMatrix& c);

double f1_score(const ConfusionMatrix& c) noexcept;

/// Named metrics usable by bootstrap and reports.
enum class Metric { auc, sensitivity, specificity, accuracy, f1 };

inline constexpr Metric kAllMetrics[] = {Metric::auc, Metric::sensitivity, Metric::specificity, Metric::accuracy,
                                         Metric::f1};

std::string_view to_string(Metric metric);
std::optional<Metric> parse_metric(std::string_view text);

struct RocPoint {
  double threshold = 0.0;  ///< +inf for the leading "nothing positive" point
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// One operating point per distinct score (ties move together), swept from
/// the highest score down, preceded by a sentinel point at (0,0).
RocCurve roc_points(std::span<const Scored> scored);

/// Mann-Whitney AUC with mid-ranks for ties. Exact: the rank sums are
/// accumulated in integers. Throws unless both classes are present.
double auc(std::span<const Scored> scored);

/// Same statistic; reorders `scored` by score and returns nullopt when a
/// class is absent. Avoids the allocations of RankedScores for one-off use.
std::optional<double> auc_in_place(std::span<Scored> scored);

/// Trapezoidal area under a ROC polyline; an independent route to the AUC.
double trapezoid_area(const RocCurve& curve);

/// `threshold,fpr,tpr` rows, shortest round-trip numbers, "inf" for the sentinel.
std::string roc_to_csv(const RocCurve& curve);

/// Scores sorted once so that the AUC of any reweighting (e.g. a bootstrap
/// resample expressed as multiplicities) is a linear pass.
class RankedScores {
 public:
  explicit RankedScores(std::span<const Scored> scored);

  std::size_t size() const noexcept { return labels_.size(); }

  /// AUC with every item weighted 1.
  std::optional<double> auc() const;
  /// AUC of the multiset where item i (input order) appears weights[i] times.
  /// nullopt when a class has zero total weight.
  std::optional<double> auc(std::span<const std::uint32_t> weights) const;

 private:
  std::vector<std::uint32_t> order_;       // input indices, ascending score
  std::vector<std::uint32_t> group_ends_;  // exclusive end of each tie group within order_
  std::vector<std::uint8_t> labels_;       // input order
};

}  // namespace screeneval
