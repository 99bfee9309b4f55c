#include "screeneval/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "screeneval/error.hpp"
#include "screeneval/rng.hpp"

namespace screeneval {

std::string_view to_string(Level level) { return level == Level::image ? "image" : "subject"; }

std::optional<Level> parse_level(std::string_view text) {
  if (text == "image") return Level::image;
  if (text == "subject") return Level::subject;
  return std::nullopt;
}

namespace {

ConfusionMatrix counts_for(std::uint64_t tp, std::uint64_t fp, std::uint64_t positives, std::uint64_t negatives) {
  return ConfusionMatrix{tp, positives - tp, fp, negatives - fp};
}

// Exact comparison of 2tp/(2tp+fp+fn) between two matrices.
bool f1_greater(const ConfusionMatrix& a, const ConfusionMatrix& b) {
  const uint128_t num_a = 2 * a.tp;
  const uint128_t den_a = std::max<std::uint64_t>(2 * a.tp + a.fp + a.fn, 1);
  const uint128_t num_b = 2 * b.tp;
  const uint128_t den_b = std::max<std::uint64_t>(2 * b.tp + b.fp + b.fn, 1);
  return num_a * den_b > num_b * den_a;
}

}  // namespace

std::vector<ThresholdCandidate> scan_thresholds(std::span<const Scored> scored, ThresholdMode mode) {
  std::vector<Scored> sorted(scored.begin(), scored.end());
  std::sort(sorted.begin(), sorted.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });

  std::uint64_t positives = 0;
  for (const auto& s : sorted) positives += s.label == 1 ? 1 : 0;
  const std::uint64_t negatives = sorted.size() - positives;

  std::vector<ThresholdCandidate> out;
  auto push = [&](double threshold, std::uint64_t tp, std::uint64_t fp) {
    const auto counts = counts_for(tp, fp, positives, negatives);
    out.push_back({threshold, f1_score(counts), counts});
  };

  if (mode == ThresholdMode::ge) push(std::numeric_limits<double>::infinity(), 0, 0);

  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const bool group_start = i == 0 || sorted[i - 1].score != sorted[i].score;
    // gt: the candidate at score s counts only what lies strictly above s.
    if (mode == ThresholdMode::gt && group_start) push(sorted[i].score, tp, fp);
    (sorted[i].label == 1 ? tp : fp) += 1;
    const bool group_end = i + 1 == sorted.size() || sorted[i + 1].score != sorted[i].score;
    if (mode == ThresholdMode::ge && group_end) push(sorted[i].score, tp, fp);
  }

  if (mode == ThresholdMode::gt && !sorted.empty()) {
    push(std::nextafter(sorted.back().score, -std::numeric_limits<double>::infinity()), tp, fp);
  }
  return out;
}

ThresholdCandidate best_f1_threshold(std::span<const Scored> scored, ThresholdMode mode) {
  bool pos = false;
  bool neg = false;
  for (const auto& s : scored) (s.label == 1 ? pos : neg) = true;
  if (!pos || !neg) throw Error(ErrorKind::undefined_metric, "undefined metric: f1 threshold search needs both classes");

  const auto candidates = scan_thresholds(scored, mode);
  // Candidates run from the highest threshold down; only a strict
  // improvement replaces the incumbent, so ties keep the larger threshold.
  const ThresholdCandidate* best = &candidates.front();
  for (const auto& c : candidates) {
    if (f1_greater(c.counts, best->counts)) best = &c;
  }
  return *best;
}

CalibrationArtifact calibrate(const Dataset& dataset, Level level, std::optional<VoteStrategy> strategy,
                              ThresholdMode mode) {
  if (level == Level::subject && !strategy) {
    throw Error(ErrorKind::invalid_argument, "subject-level calibration requires a vote strategy");
  }
  if (level == Level::image && strategy) {
    throw Error(ErrorKind::invalid_argument, "image-level calibration takes no vote strategy");
  }

  const auto groups = partition_and_group(dataset, GroupFilter{Split::validation, std::nullopt});
  if (groups.empty()) throw Error(ErrorKind::missing_data, "dataset has no validation split");

  std::vector<Scored> scored;
  if (level == Level::image) {
    for (const auto& g : groups) {
      for (const auto& s : g.scores) scored.push_back({s.score, g.label});
    }
  } else {
    for (const auto& s : aggregate_dataset(groups, *strategy)) scored.push_back({s.score, s.label});
  }

  const auto best = best_f1_threshold(scored, mode);
  CalibrationArtifact artifact;
  artifact.threshold = best.threshold;
  artifact.achieved_f1 = best.f1;
  artifact.level = level;
  artifact.strategy = strategy;
  artifact.validation_counts = best.counts;
  artifact.created_from = dataset.provenance();
  artifact.mode = mode;
  return artifact;
}

nlohmann::json to_json(const CalibrationArtifact& a) {
  nlohmann::json doc;
  doc["threshold"] = a.threshold;
  doc["achieved_f1"] = a.achieved_f1;
  doc["level"] = std::string(to_string(a.level));
  doc["strategy"] = a.strategy ? nlohmann::json(std::string(to_string(*a.strategy))) : nlohmann::json(nullptr);
  doc["validation_counts"] = {{"tp", a.validation_counts.tp},
                              {"fn", a.validation_counts.fn},
                              {"fp", a.validation_counts.fp},
                              {"tn", a.validation_counts.tn}};
  doc["created_from"] = a.created_from;
  doc["threshold_mode"] = std::string(to_string(a.mode));
  return doc;
}

CalibrationArtifact artifact_from_json(const nlohmann::json& doc) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::parse, "calibration artifact: " + what); };
  if (!doc.is_object()) fail("expected an object");

  CalibrationArtifact a;
  try {
    a.threshold = doc.at("threshold").get<double>();
    a.achieved_f1 = doc.at("achieved_f1").get<double>();
    const auto level = parse_level(doc.at("level").get<std::string>());
    if (!level) fail("unknown level");
    a.level = *level;
    if (doc.contains("strategy") && !doc["strategy"].is_null()) {
      const auto strategy = parse_strategy(doc["strategy"].get<std::string>());
      if (!strategy) fail("unknown strategy");
      a.strategy = strategy;
    }
    const auto& counts = doc.at("validation_counts");
    a.validation_counts = {counts.at("tp").get<std::uint64_t>(), counts.at("fn").get<std::uint64_t>(),
                           counts.at("fp").get<std::uint64_t>(), counts.at("tn").get<std::uint64_t>()};
    a.created_from = doc.value("created_from", std::string{});
    const auto mode = parse_threshold_mode(doc.value("threshold_mode", std::string("ge")));
    if (!mode) fail("unknown threshold_mode");
    a.mode = *mode;
  } catch (const nlohmann::json::exception& e) {
    fail(e.what());
  }

  if (!std::isfinite(a.threshold)) fail("threshold must be finite");
  if ((a.level == Level::subject) != a.strategy.has_value()) fail("strategy is required exactly when level is subject");
  if (std::abs(a.achieved_f1 - f1_score(a.validation_counts)) > 1e-9) {
    fail("achieved_f1 disagrees with validation_counts");
  }
  return a;
}

ArtifactSet::ArtifactSet(std::vector<CalibrationArtifact> artifacts) {
  for (auto& a : artifacts) add(std::move(a));
}

void ArtifactSet::add(CalibrationArtifact artifact) {
  for (auto& existing : artifacts_) {
    if (existing.level == artifact.level && existing.strategy == artifact.strategy) {
      existing = std::move(artifact);
      return;
    }
  }
  artifacts_.push_back(std::move(artifact));
}

const CalibrationArtifact* ArtifactSet::find(Level level, std::optional<VoteStrategy> strategy) const {
  for (const auto& a : artifacts_) {
    if (a.level == level && a.strategy == strategy) return &a;
  }
  return nullptr;
}

ArtifactSet load_artifacts(std::span<const std::filesystem::path> paths) {
  ArtifactSet set;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::missing_data, "cannot open artifact file '" + path.string() + "'");
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::parse, "artifact file '" + path.string() + "': " + e.what());
    }
    if (doc.is_array()) {
      for (const auto& item : doc) set.add(artifact_from_json(item));
    } else {
      set.add(artifact_from_json(doc));
    }
  }
  return set;
}

nlohmann::json to_json(const ArtifactSet& set) {
  auto doc = nlohmann::json::array();
  for (const auto& a : set.all()) doc.push_back(to_json(a));
  return doc;
}

}  // namespace screeneval
