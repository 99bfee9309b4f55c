#include <algorithm>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "screeneval/error.hpp"
#include "screeneval/metrics.hpp"
#include "screeneval/rng.hpp"

namespace screeneval {
namespace {

TEST(ConfusionAt, SeparatedPair) {
  const std::vector<Scored> s{{0.9, 1}, {0.2, 0}};
  EXPECT_EQ(confusion_at(s, 0.5), (ConfusionMatrix{1, 0, 0, 1}));
}

TEST(ConfusionAt, ZeroThresholdPredictsEverythingPositive) {
  const std::vector<Scored> s{{0.9, 1}, {0.0, 0}, {0.3, 0}, {0.0, 1}};
  EXPECT_EQ(confusion_at(s, 0.0), (ConfusionMatrix{2, 0, 2, 0}));
}

TEST(ConfusionAt, ModeAtEquality) {
  const std::vector<Scored> s{{0.5, 1}, {0.5, 0}};
  EXPECT_EQ(confusion_at(s, DecisionRule{0.5, ThresholdMode::ge}), (ConfusionMatrix{1, 0, 1, 0}));
  EXPECT_EQ(confusion_at(s, DecisionRule{0.5, ThresholdMode::gt}), (ConfusionMatrix{0, 1, 0, 1}));
}

TEST(ConfusionAt, EmptyInputThrows) { EXPECT_THROW(confusion_at({}, 0.5), Error); }

TEST(ConfusionAt, TotalImageLevelCounts) {
  const auto s = testing::scored_from_counts(210, 92, 175, 1662, 0.5);
  EXPECT_EQ(confusion_at(s, 0.5), (ConfusionMatrix{210, 92, 175, 1662}));
}

TEST(ConfusionWeighted, MatchesExpandedList) {
  const std::vector<Scored> s{{0.9, 1}, {0.2, 0}, {0.6, 0}, {0.4, 1}};
  const std::vector<std::uint32_t> w{2, 0, 3, 1};
  EXPECT_EQ(confusion_weighted(s, w, {0.5, ThresholdMode::ge}), (ConfusionMatrix{2, 1, 3, 0}));
}

TEST(MetricsFromConfusion, TotalImageLevel) {
  const auto m = metrics_from_confusion({210, 92, 175, 1662});
  EXPECT_NEAR(m.sensitivity, 0.695, 0.002);
  EXPECT_NEAR(m.specificity, 0.905, 0.002);
  EXPECT_NEAR(m.accuracy, 0.875, 0.002);
  EXPECT_NEAR(m.f1, 0.611, 0.002);
}

TEST(MetricsFromConfusion, TotalMaxVoting) {
  const auto m = metrics_from_confusion({61, 3, 68, 346});
  EXPECT_NEAR(m.sensitivity, 0.953, 0.002);
  EXPECT_NEAR(m.specificity, 0.836, 0.002);
  EXPECT_NEAR(m.accuracy, 0.851, 0.002);
  EXPECT_NEAR(m.f1, 0.632, 0.002);
}

TEST(MetricsFromConfusion, PublishedRows) {
  for (const auto& row : testing::published_rows()) {
    const auto m = metrics_from_confusion(row.counts);
    EXPECT_NEAR(m.sensitivity, row.sensitivity, 0.002) << row.scope << " " << row.level;
    EXPECT_NEAR(m.specificity, row.specificity, 0.002) << row.scope << " " << row.level;
    EXPECT_NEAR(m.accuracy, row.accuracy, 0.002) << row.scope << " " << row.level;
    EXPECT_NEAR(m.f1, row.f1, 0.002) << row.scope << " " << row.level;
  }
}

TEST(MetricsFromConfusion, PerfectClassifier) {
  const auto m = metrics_from_confusion({7, 0, 0, 11});
  EXPECT_EQ(m.sensitivity, 1.0);
  EXPECT_EQ(m.specificity, 1.0);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.f1, 1.0);
  EXPECT_EQ(m.precision, 1.0);
}

TEST(MetricsFromConfusion, NothingPredictedPositive) {
  const auto m = metrics_from_confusion({0, 4, 0, 6});
  EXPECT_EQ(m.f1, 0.0);
  EXPECT_FALSE(m.precision.has_value());
}

TEST(MetricsFromConfusion, SingleClassNamesMetric) {
  try {
    metrics_from_confusion({3, 1, 0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::undefined_metric);
    EXPECT_NE(std::string(e.what()).find("undefined metric"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("specificity"), std::string::npos);
  }
}

TEST(MetricsFromConfusionProperty, ComplementIdentities) {
  Xoshiro256 rng(17);
  for (int i = 0; i < 1000; ++i) {
    const ConfusionMatrix c{rng.below(50), 1 + rng.below(50), rng.below(50), 1 + rng.below(50)};
    const auto m = metrics_from_confusion(c);
    EXPECT_NEAR(m.sensitivity + double(c.fn) / double(c.tp + c.fn), 1.0, 1e-15);
    EXPECT_NEAR(m.specificity + double(c.fp) / double(c.fp + c.tn), 1.0, 1e-15);
  }
}

TEST(Roc, PerfectSeparation) {
  const std::vector<Scored> s{{1.0, 1}, {0.0, 0}};
  const auto curve = roc_points(s);
  ASSERT_EQ(curve.points.size(), 3u);
  EXPECT_EQ(curve.points[0].fpr, 0.0);
  EXPECT_EQ(curve.points[0].tpr, 0.0);
  EXPECT_EQ(curve.points[1].fpr, 0.0);
  EXPECT_EQ(curve.points[1].tpr, 1.0);
  EXPECT_EQ(curve.points[2].fpr, 1.0);
  EXPECT_EQ(curve.points[2].tpr, 1.0);
  EXPECT_EQ(curve.auc, 1.0);
}

TEST(Roc, AllTied) {
  const std::vector<Scored> s{{0.4, 1}, {0.4, 0}, {0.4, 0}, {0.4, 1}, {0.4, 1}};
  const auto curve = roc_points(s);
  ASSERT_EQ(curve.points.size(), 2u);
  EXPECT_EQ(curve.points[1].fpr, 1.0);
  EXPECT_EQ(curve.points[1].tpr, 1.0);
  EXPECT_EQ(curve.auc, 0.5);
  EXPECT_EQ(auc(s), 0.5);
}

TEST(Roc, FourPointExample) {
  const std::vector<Scored> s{{0.8, 1}, {0.4, 1}, {0.6, 0}, {0.2, 0}};
  EXPECT_EQ(oracles::pairwise_auc(s), 0.75);
  EXPECT_EQ(auc(s), 0.75);
  EXPECT_EQ(roc_points(s).auc, 0.75);
  EXPECT_EQ(trapezoid_area(roc_points(s)), 0.75);
}

TEST(Roc, SingleClassThrows) {
  const std::vector<Scored> s{{0.8, 1}, {0.4, 1}};
  EXPECT_THROW(roc_points(s), Error);
  EXPECT_THROW(auc(s), Error);
}

TEST(Roc, CsvFormat) {
  const std::vector<Scored> s{{1.0, 1}, {0.25, 0}};
  EXPECT_EQ(roc_to_csv(roc_points(s)), "threshold,fpr,tpr\ninf,0,0\n1,0,1\n0.25,1,1\n");
}

TEST(AucProperty, MatchesPairwiseOracleAndTrapezoid) {
  Xoshiro256 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = oracles::random_scored(rng, 2 + rng.below(49), 1 + rng.below(10));
    const double exact = oracles::pairwise_auc(s);
    EXPECT_EQ(auc(s), exact);
    const auto curve = roc_points(s);
    EXPECT_NEAR(trapezoid_area(curve), exact, 1e-12);
    EXPECT_EQ(RankedScores(s).auc().value(), exact);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      EXPECT_GE(curve.points[i].fpr, curve.points[i - 1].fpr);
      EXPECT_GE(curve.points[i].tpr, curve.points[i - 1].tpr);
      EXPECT_LT(curve.points[i].threshold, curve.points[i - 1].threshold);
    }
    EXPECT_EQ(curve.points.back().fpr, 1.0);
    EXPECT_EQ(curve.points.back().tpr, 1.0);
  }
}

TEST(AucProperty, LabelFlipGivesComplement) {
  Xoshiro256 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    auto s = oracles::random_scored(rng, 2 + rng.below(40), 1 + rng.below(6));
    const double a = auc(s);
    for (auto& x : s) x.label = 1 - x.label;
    EXPECT_NEAR(auc(s), 1.0 - a, 1e-15);
  }
}

TEST(AucProperty, InvariantUnderIncreasingTransform) {
  Xoshiro256 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = oracles::random_scored(rng, 2 + rng.below(40), 1 + rng.below(12));
    auto t = s;
    for (auto& x : t) x.score = std::pow(x.score, 3.0) * 0.5 + 0.1;
    EXPECT_EQ(auc(s), auc(t));
    const auto a = roc_points(s), b = roc_points(t);
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      EXPECT_EQ(a.points[i].fpr, b.points[i].fpr);
      EXPECT_EQ(a.points[i].tpr, b.points[i].tpr);
    }
    const double tau = s[rng.below(s.size())].score;
    EXPECT_EQ(confusion_at(s, tau), confusion_at(t, std::pow(tau, 3.0) * 0.5 + 0.1));
  }
}

TEST(RankedScoresProperty, WeightedAucMatchesExpandedOracle) {
  Xoshiro256 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = oracles::random_scored(rng, 2 + rng.below(30), 1 + rng.below(8));
    std::vector<std::uint32_t> w(s.size());
    std::vector<Scored> expanded;
    for (std::size_t i = 0; i < s.size(); ++i) {
      w[i] = static_cast<std::uint32_t>(rng.below(4));
      for (std::uint32_t k = 0; k < w[i]; ++k) expanded.push_back(s[i]);
    }
    const auto weighted = RankedScores(s).auc(w);
    const bool both = std::any_of(expanded.begin(), expanded.end(), [](auto& x) { return x.label == 1; }) &&
                      std::any_of(expanded.begin(), expanded.end(), [](auto& x) { return x.label == 0; });
    ASSERT_EQ(weighted.has_value(), both);
    if (both) {
      EXPECT_EQ(*weighted, oracles::pairwise_auc(expanded));
    }
  }
}

}  // namespace
}  // namespace screeneval
