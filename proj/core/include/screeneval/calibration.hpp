#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "screeneval/dataset.hpp"
#include "screeneval/metrics.hpp"
#include "screeneval/voting.hpp"

namespace screeneval {

enum class Level { image, subject };

std::string_view to_string(Level level);
std::optional<Level> parse_level(std::string_view text);

struct ThresholdCandidate {
  double threshold = 0.0;
  double f1 = 0.0;
  ConfusionMatrix counts;
};

/// Every candidate threshold with its F1, highest threshold first.
///
/// In ge mode the candidates are the distinct observed scores plus +inf
/// (predict nothing positive). In gt mode they are the distinct observed
/// scores plus the largest double below the minimum score (predict
/// everything positive). Each candidate induces a different partition, so
/// the list is exhaustive for any step-function metric.
std::vector<ThresholdCandidate> scan_thresholds(std::span<const Scored> scored,
                                                ThresholdMode mode = ThresholdMode::ge);

/// F1-maximising candidate; ties go to the largest threshold. Both classes
/// are required. With both present the ge sentinel can never win, so the
/// result is always an observed score in ge mode.
ThresholdCandidate best_f1_threshold(std::span<const Scored> scored, ThresholdMode mode = ThresholdMode::ge);

/// A frozen operating point and the validation evidence that produced it.
struct CalibrationArtifact {
  double threshold = 0.5;
  double achieved_f1 = 0.0;
  Level level = Level::image;
  std::optional<VoteStrategy> strategy;  ///< set iff level == subject
  ConfusionMatrix validation_counts;
  std::string created_from;
  ThresholdMode mode = ThresholdMode::ge;

  DecisionRule rule() const { return {threshold, mode}; }
};

/// Calibrates on the validation split of `dataset`. Subject level first
/// aggregates validation subjects with `strategy`.
CalibrationArtifact calibrate(const Dataset& dataset, Level level, std::optional<VoteStrategy> strategy,
                              ThresholdMode mode = ThresholdMode::ge);

nlohmann::json to_json(const CalibrationArtifact& artifact);
CalibrationArtifact artifact_from_json(const nlohmann::json& doc);

/// Artifacts keyed by (level, strategy). Later insertions replace earlier ones.
class ArtifactSet {
 public:
  ArtifactSet() = default;
  explicit ArtifactSet(std::vector<CalibrationArtifact> artifacts);

  void add(CalibrationArtifact artifact);
  const CalibrationArtifact* find(Level level, std::optional<VoteStrategy> strategy) const;
  const std::vector<CalibrationArtifact>& all() const noexcept { return artifacts_; }
  bool empty() const noexcept { return artifacts_.empty(); }

 private:
  std::vector<CalibrationArtifact> artifacts_;
};

/// An artifact file holds either one artifact object or an array of them.
ArtifactSet load_artifacts(std::span<const std::filesystem::path> paths);
nlohmann::json to_json(const ArtifactSet& set);

}  // namespace screeneval
