#include "screeneval/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "screeneval/error.hpp"

namespace screeneval {

std::string_view to_string(ThresholdMode mode) { return mode == ThresholdMode::ge ? "ge" : "gt"; }

std::optional<ThresholdMode> parse_threshold_mode(std::string_view text) {
  if (text == "ge") return ThresholdMode::ge;
  if (text == "gt") return ThresholdMode::gt;
  return std::nullopt;
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::auc: return "auc";
    case Metric::sensitivity: return "sensitivity";
    case Metric::specificity: return "specificity";
    case Metric::accuracy: return "accuracy";
    case Metric::f1: return "f1";
  }
  return "auc";
}

std::optional<Metric> parse_metric(std::string_view text) {
  for (Metric m : kAllMetrics) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

ConfusionMatrix confusion_at(std::span<const Scored> scored, const DecisionRule& rule) {
  if (scored.empty()) throw Error(ErrorKind::invalid_argument, "confusion matrix of an empty set");
  ConfusionMatrix c;
  for (const auto& s : scored) {
    const bool predicted = rule.positive(s.score);
    if (s.label == 1) {
      predicted ? ++c.tp : ++c.fn;
    } else {
      predicted ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

ConfusionMatrix confusion_weighted(std::span<const Scored> scored, std::span<const std::uint32_t> weights,
                                   const DecisionRule& rule) {
  ConfusionMatrix c;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    const std::uint64_t w = weights[i];
    if (w == 0) continue;
    const bool predicted = rule.positive(scored[i].score);
    if (scored[i].label == 1) {
      (predicted ? c.tp : c.fn) += w;
    } else {
      (predicted ? c.fp : c.tn) += w;
    }
  }
  return c;
}

double f1_score(const ConfusionMatrix& c) noexcept {
  const std::uint64_t denom = 2 * c.tp + c.fp + c.fn;
  return denom == 0 ? 0.0 : static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

MetricSet metrics_from_confusion(const ConfusionMatrix& c) {
  if (c.positives() == 0) throw Error(ErrorKind::undefined_metric, "undefined metric: sensitivity (no positives)");
  if (c.negatives() == 0) throw Error(ErrorKind::undefined_metric, "undefined metric: specificity (no negatives)");
  MetricSet m;
  m.sensitivity = static_cast<double>(c.tp) / static_cast<double>(c.positives());
  m.specificity = static_cast<double>(c.tn) / static_cast<double>(c.negatives());
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  m.f1 = f1_score(c);
  if (c.tp + c.fp > 0) m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  return m;
}

namespace {

void require_both_classes(std::span<const Scored> scored, const char* what) {
  bool pos = false;
  bool neg = false;
  for (const auto& s : scored) {
    (s.label == 1 ? pos : neg) = true;
  }
  if (!pos || !neg) {
    throw Error(ErrorKind::undefined_metric, std::string("undefined metric: ") + what + " needs both classes");
  }
}

}  // namespace

RankedScores::RankedScores(std::span<const Scored> scored) : order_(scored.size()), labels_(scored.size()) {
  std::iota(order_.begin(), order_.end(), 0u);
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return scored[a].score < scored[b].score; });
  for (std::size_t i = 0; i < scored.size(); ++i) labels_[i] = scored[i].label == 1 ? 1 : 0;
  for (std::size_t i = 0; i < order_.size(); ++i) {
    if (i + 1 == order_.size() || scored[order_[i + 1]].score != scored[order_[i]].score) {
      group_ends_.push_back(static_cast<std::uint32_t>(i + 1));
    }
  }
}

std::optional<double> RankedScores::auc() const {
  const std::vector<std::uint32_t> ones(labels_.size(), 1u);
  return auc(ones);
}

std::optional<double> RankedScores::auc(std::span<const std::uint32_t> weights) const {
  // Twice the positive rank sum, using mid-ranks: a tie group occupying ranks
  // c+1..c+w has mid-rank c + (w+1)/2, i.e. doubled 2c + w + 1.
  std::uint64_t cumulative = 0;
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
  std::uint64_t twice_rank_sum = 0;
  std::uint32_t begin = 0;
  for (std::uint32_t end : group_ends_) {
    std::uint64_t group_pos = 0;
    std::uint64_t group_neg = 0;
    for (std::uint32_t k = begin; k < end; ++k) {
      const std::uint32_t idx = order_[k];
      (labels_[idx] ? group_pos : group_neg) += weights[idx];
    }
    const std::uint64_t group_weight = group_pos + group_neg;
    twice_rank_sum += group_pos * (2 * cumulative + group_weight + 1);
    cumulative += group_weight;
    positives += group_pos;
    negatives += group_neg;
    begin = end;
  }
  if (positives == 0 || negatives == 0) return std::nullopt;
  // 2U = 2R - P(P+1)
  const std::uint64_t twice_u = twice_rank_sum - positives * (positives + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

std::optional<double> auc_in_place(std::span<Scored> scored) {
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) { return a.score < b.score; });
  std::uint64_t cumulative = 0, positives = 0, twice_rank_sum = 0;
  for (std::size_t begin = 0; begin < scored.size();) {
    std::size_t end = begin;
    std::uint64_t group_pos = 0;
    while (end < scored.size() && scored[end].score == scored[begin].score) group_pos += scored[end++].label == 1;
    const std::uint64_t group_weight = end - begin;
    twice_rank_sum += group_pos * (2 * cumulative + group_weight + 1);
    cumulative += group_weight;
    positives += group_pos;
    begin = end;
  }
  const std::uint64_t negatives = cumulative - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;
  const std::uint64_t twice_u = twice_rank_sum - positives * (positives + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

double auc(std::span<const Scored> scored) {
  require_both_classes(scored, "auc");
  return *RankedScores(scored).auc();
}

RocCurve roc_points(std::span<const Scored> scored) {
  require_both_classes(scored, "roc");
  std::vector<Scored> sorted(scored.begin(), scored.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });

  std::uint64_t positives = 0;
  for (const auto& s : sorted) positives += s.label == 1 ? 1 : 0;
  const std::uint64_t negatives = sorted.size() - positives;
  const double p = static_cast<double>(positives);
  const double n = static_cast<double>(negatives);

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    (sorted[i].label == 1 ? tp : fp) += 1;
    if (i + 1 == sorted.size() || sorted[i + 1].score != sorted[i].score) {
      curve.points.push_back({sorted[i].score, static_cast<double>(fp) / n, static_cast<double>(tp) / p});
    }
  }
  curve.auc = auc(scored);
  return curve;
}

double trapezoid_area(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  return area;
}

namespace {

void append_number(std::string& out, double value) {
  if (std::isinf(value)) {
    out += value > 0 ? "inf" : "-inf";
    return;
  }
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, ptr);
}

}  // namespace

std::string roc_to_csv(const RocCurve& curve) {
  std::string out = "threshold,fpr,tpr\n";
  for (const auto& pt : curve.points) {
    append_number(out, pt.threshold);
    out += ',';
    append_number(out, pt.fpr);
    out += ',';
    append_number(out, pt.tpr);
    out += '\n';
  }
  return out;
}

}  // namespace screeneval
