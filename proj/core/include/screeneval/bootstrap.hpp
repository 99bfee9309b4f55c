#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "screeneval/calibration.hpp"
#include "screeneval/dataset.hpp"
#include "screeneval/metrics.hpp"
#include "screeneval/voting.hpp"

namespace screeneval {

/// What is drawn with replacement: single photographs, or whole subjects
/// with all of their photographs.
enum class ResampleUnit { photo, subject };

std::string_view to_string(ResampleUnit unit);
std::optional<ResampleUnit> parse_unit(std::string_view text);

struct BootstrapConfig {
  std::size_t replicates = 1000;
  double confidence = 0.95;
  std::uint64_t seed = 0;
  ResampleUnit unit = ResampleUnit::photo;

  void validate() const;
};

struct IntervalEstimate {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t excluded_replicates = 0;  ///< replicates where the metric was undefined
  std::size_t replicates = 0;

  /// More than 1% of replicates were dropped.
  bool exclusion_warning() const noexcept { return excluded_replicates * 100 > replicates; }
};

/// The data a metric is evaluated on: subject groups plus how to score them.
/// Image level scores every photograph; subject level votes each group with
/// `strategy` first. `rule` is used by the threshold metrics.
struct EvaluationSlice {
  std::vector<SubjectGroup> groups;
  Level level = Level::image;
  std::optional<VoteStrategy> strategy;
  DecisionRule rule;

  /// The (score, label) list the metrics module sees for this slice.
  std::vector<Scored> scored() const;
};

/// Full-sample value through the metrics module. Throws Error(undefined_metric)
/// when a class is missing.
double point_estimate(const EvaluationSlice& slice, Metric metric);

/// Percentile bootstrap interval. Replicate r draws from the stream
/// Xoshiro256::stream(cfg.seed, r), so results depend only on
/// (slice, metric, cfg) and not on evaluation order or thread count.
IntervalEstimate bootstrap_ci(const EvaluationSlice& slice, Metric metric, const BootstrapConfig& cfg);

/// Several metrics over the same set of resamples. Element i equals
/// bootstrap_ci(slice, metrics[i], cfg).
std::vector<IntervalEstimate> bootstrap_ci(const EvaluationSlice& slice, std::span<const Metric> metrics,
                                           const BootstrapConfig& cfg);

/// Quantile of sorted data by linear interpolation between order statistics:
/// h = (n-1)p, x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
double quantile_linear(std::span<const double> sorted, double p);

/// "0.913(0.898-0.927)"
std::string format_interval(const IntervalEstimate& interval);

}  // namespace screeneval
