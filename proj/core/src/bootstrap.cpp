#include "screeneval/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "screeneval/error.hpp"
#include "screeneval/rng.hpp"

namespace screeneval {

std::string_view to_string(ResampleUnit unit) { return unit == ResampleUnit::photo ? "photo" : "subject"; }

std::optional<ResampleUnit> parse_unit(std::string_view text) {
  if (text == "photo") return ResampleUnit::photo;
  if (text == "subject") return ResampleUnit::subject;
  return std::nullopt;
}

void BootstrapConfig::validate() const {
  if (replicates < 1) throw Error(ErrorKind::invalid_argument, "bootstrap replicates must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "bootstrap confidence must lie in (0,1)");
  }
}

std::vector<Scored> EvaluationSlice::scored() const {
  std::vector<Scored> out;
  if (level == Level::image) {
    for (const auto& g : groups) {
      for (const auto& s : g.scores) out.push_back({s.score, g.label});
    }
    return out;
  }
  if (!strategy) throw Error(ErrorKind::invalid_argument, "subject-level slice requires a vote strategy");
  for (const auto& s : aggregate_dataset(groups, *strategy)) out.push_back({s.score, s.label});
  return out;
}

namespace {

double metric_value(Metric metric, const ConfusionMatrix& c) {
  const auto m = metrics_from_confusion(c);
  switch (metric) {
    case Metric::sensitivity: return m.sensitivity;
    case Metric::specificity: return m.specificity;
    case Metric::accuracy: return m.accuracy;
    case Metric::f1: return m.f1;
    case Metric::auc: break;
  }
  return 0.0;
}

// Evaluates one resample, expressed as per-item multiplicities, for every
// requested metric. NaN marks "undefined in this replicate".
class ReplicateEvaluator {
 public:
  ReplicateEvaluator(const EvaluationSlice& slice, const BootstrapConfig& cfg, std::span<const Metric> metrics)
      : slice_(slice), cfg_(cfg), metrics_(metrics) {
    for (std::uint32_t g = 0; g < slice.groups.size(); ++g) {
      for (const auto& s : slice.groups[g].scores) {
        image_scored_.push_back({s.score, slice.groups[g].label});
        image_group_.push_back(g);
      }
    }
    if (slice.level == Level::subject) subject_scored_ = slice.scored();

    const bool resample_photos = cfg.unit == ResampleUnit::photo;
    fixed_items_ = slice.level == Level::image ? &image_scored_ : &subject_scored_;
    // Photo resampling at subject level re-votes each subject per replicate,
    // so no fixed ranking exists for that combination.
    if (!(slice.level == Level::subject && resample_photos)) {
      ranked_.emplace(*fixed_items_);
      return;
    }
    group_begin_.push_back(0);
    for (std::uint32_t i = 0; i < image_scored_.size(); ++i) {
      if (i > 0 && image_group_[i] != image_group_[i - 1]) group_begin_.push_back(i);
      sorted_images_.push_back(i);
    }
    group_begin_.push_back(static_cast<std::uint32_t>(image_scored_.size()));
    for (std::size_t g = 0; g + 1 < group_begin_.size(); ++g) {
      std::stable_sort(sorted_images_.begin() + group_begin_[g], sorted_images_.begin() + group_begin_[g + 1],
                       [&](std::uint32_t a, std::uint32_t b) { return image_scored_[a].score < image_scored_[b].score; });
    }
  }

  void evaluate(std::size_t replicate, std::span<double> out) const {
    auto rng = Xoshiro256::stream(cfg_.seed, replicate);
    const std::size_t groups = slice_.groups.size();
    const std::size_t images = image_scored_.size();

    std::vector<std::uint32_t> weights;
    if (cfg_.unit == ResampleUnit::photo) {
      weights.assign(images, 0);
      for (std::size_t k = 0; k < images; ++k) ++weights[rng.below(images)];
      if (slice_.level == Level::subject) {
        evaluate_revoted(weights, out);
        return;
      }
    } else {
      std::vector<std::uint32_t> group_weights(groups, 0);
      for (std::size_t k = 0; k < groups; ++k) ++group_weights[rng.below(groups)];
      if (slice_.level == Level::subject) {
        weights = std::move(group_weights);
      } else {
        weights.resize(images);
        for (std::size_t i = 0; i < images; ++i) weights[i] = group_weights[image_group_[i]];
      }
    }
    evaluate_weighted(*fixed_items_, *ranked_, weights, out);
  }

 private:
  void evaluate_weighted(const std::vector<Scored>& items, const RankedScores& ranked,
                         std::span<const std::uint32_t> weights, std::span<double> out) const {
    const auto counts = confusion_weighted(items, weights, slice_.rule);
    const bool defined = counts.positives() > 0 && counts.negatives() > 0;
    for (std::size_t m = 0; m < metrics_.size(); ++m) {
      if (!defined) {
        out[m] = std::nan("");
      } else if (metrics_[m] == Metric::auc) {
        out[m] = *ranked.auc(weights);
      } else {
        out[m] = metric_value(metrics_[m], counts);
      }
    }
  }

  // Re-votes every subject from its resampled photographs. Subjects whose
  // photographs were all left out drop out of the replicate. Mean votes sum
  // in ascending score order, as vote() does.
  void evaluate_revoted(std::span<const std::uint32_t> weights, std::span<double> out) const {
    std::vector<Scored> subjects;
    subjects.reserve(slice_.groups.size());
    const bool use_max = *slice_.strategy == VoteStrategy::max;
    for (std::size_t g = 0; g < slice_.groups.size(); ++g) {
      double sum = 0.0, lo = 0.0, hi = 0.0;
      std::uint64_t count = 0;
      for (std::uint32_t k = group_begin_[g]; k < group_begin_[g + 1]; ++k) {
        const std::uint32_t idx = sorted_images_[k];
        const std::uint32_t w = weights[idx];
        if (w == 0) continue;
        const double score = image_scored_[idx].score;
        if (count == 0) lo = score;
        hi = score;
        sum += static_cast<double>(w) * score;
        count += w;
      }
      if (count == 0) continue;
      const double subject = use_max ? hi : std::clamp(sum / static_cast<double>(count), lo, hi);
      subjects.push_back({subject, slice_.groups[g].label});
    }
    ConfusionMatrix counts;
    for (const auto& s : subjects) {
      const bool predicted = slice_.rule.positive(s.score);
      if (s.label == 1) {
        (predicted ? counts.tp : counts.fn) += 1;
      } else {
        (predicted ? counts.fp : counts.tn) += 1;
      }
    }
    const bool defined = counts.positives() > 0 && counts.negatives() > 0;
    for (std::size_t m = 0; m < metrics_.size(); ++m) {
      if (!defined) {
        out[m] = std::nan("");
      } else if (metrics_[m] == Metric::auc) {
        out[m] = *auc_in_place(subjects);
      } else {
        out[m] = metric_value(metrics_[m], counts);
      }
    }
  }

  const EvaluationSlice& slice_;
  const BootstrapConfig& cfg_;
  std::span<const Metric> metrics_;
  std::vector<Scored> image_scored_;
  std::vector<std::uint32_t> image_group_;
  std::vector<std::uint32_t> group_begin_;    // offsets into sorted_images_, one past the end last
  std::vector<std::uint32_t> sorted_images_;  // image indices, ascending score within each group
  std::vector<Scored> subject_scored_;
  const std::vector<Scored>* fixed_items_ = nullptr;
  std::optional<RankedScores> ranked_;
};

}  // namespace

double point_estimate(const EvaluationSlice& slice, Metric metric) {
  const auto scored = slice.scored();
  if (scored.empty()) throw Error(ErrorKind::undefined_metric, "undefined metric: empty slice");
  if (metric == Metric::auc) return auc(scored);
  return metric_value(metric, confusion_at(scored, slice.rule));
}

double quantile_linear(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorKind::invalid_argument, "quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<IntervalEstimate> bootstrap_ci(const EvaluationSlice& slice, std::span<const Metric> metrics,
                                           const BootstrapConfig& cfg) {
  cfg.validate();
  if (slice.groups.empty()) throw Error(ErrorKind::invalid_argument, "bootstrap over an empty slice");
  if (slice.level == Level::subject && !slice.strategy) {
    throw Error(ErrorKind::invalid_argument, "subject-level slice requires a vote strategy");
  }

  std::vector<double> points;
  for (Metric m : metrics) points.push_back(point_estimate(slice, m));

  const ReplicateEvaluator evaluator(slice, cfg, metrics);
  const std::size_t width = metrics.size();
  std::vector<double> values(cfg.replicates * width);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<unsigned>(std::min<std::size_t>(hw, cfg.replicates / 64 + 1));
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) evaluator.evaluate(r, std::span<double>(values).subspan(r * width, width));
  };
  if (workers <= 1) {
    run_range(0, cfg.replicates);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (cfg.replicates + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(cfg.replicates, begin + chunk);
      if (begin < end) pool.emplace_back(run_range, begin, end);
    }
  }

  const double tail = (1.0 - cfg.confidence) / 2.0;
  std::vector<IntervalEstimate> out;
  std::vector<double> column;
  for (std::size_t m = 0; m < width; ++m) {
    column.clear();
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
      const double v = values[r * width + m];
      if (!std::isnan(v)) column.push_back(v);
    }
    if (column.empty()) {
      throw Error(ErrorKind::undefined_metric,
                  "undefined metric: " + std::string(to_string(metrics[m])) + " undefined in every bootstrap replicate");
    }
    std::sort(column.begin(), column.end());
    IntervalEstimate est;
    est.point = points[m];
    est.lower = quantile_linear(column, tail);
    est.upper = quantile_linear(column, 1.0 - tail);
    est.excluded_replicates = cfg.replicates - column.size();
    est.replicates = cfg.replicates;
    out.push_back(est);
  }
  return out;
}

IntervalEstimate bootstrap_ci(const EvaluationSlice& slice, Metric metric, const BootstrapConfig& cfg) {
  const Metric one[] = {metric};
  return bootstrap_ci(slice, one, cfg).front();
}

std::string format_interval(const IntervalEstimate& interval) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.3f(%.3f-%.3f)", interval.point, interval.lower, interval.upper);
  return buf;
}

}  // namespace screeneval
