#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "screeneval/error.hpp"
#include "screeneval/rng.hpp"
#include "screeneval/voting.hpp"

namespace screeneval {
namespace {

TEST(Vote, MaxAndMean) {
  const std::vector<double> scores{0.2, 0.9, 0.4};
  EXPECT_EQ(vote(scores, VoteStrategy::max), 0.9);
  EXPECT_DOUBLE_EQ(vote(scores, VoteStrategy::mean), 0.5);
}

TEST(Vote, SingleScoreIsIdentity) {
  const std::vector<double> one{0.7};
  EXPECT_EQ(vote(one, VoteStrategy::max), 0.7);
  EXPECT_EQ(vote(one, VoteStrategy::mean), 0.7);
}

TEST(Vote, EmptyListThrows) {
  try {
    vote({}, VoteStrategy::mean);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "no scores for subject");
  }
}

TEST(Vote, StrategyLiterals) {
  EXPECT_EQ(parse_strategy("max"), VoteStrategy::max);
  EXPECT_EQ(parse_strategy("mean"), VoteStrategy::mean);
  EXPECT_FALSE(parse_strategy("median"));
  EXPECT_EQ(to_string(VoteStrategy::mean), "mean");
}

SubjectGroup group(std::string id, int label, std::vector<double> scores) {
  SubjectGroup g{std::move(id), label, "A", Split::test, {}};
  for (std::size_t i = 0; i < scores.size(); ++i) g.scores.push_back({g.subject_id + "-" + std::to_string(i), scores[i]});
  return g;
}

TEST(AggregateDataset, TwoGroups) {
  const std::vector<SubjectGroup> groups{group("s1", 0, {0.1, 0.3}), group("s2", 1, {0.8})};
  const auto mean = aggregate_dataset(groups, VoteStrategy::mean);
  ASSERT_EQ(mean.size(), 2u);
  EXPECT_DOUBLE_EQ(mean[0].score, 0.2);
  EXPECT_EQ(mean[1].score, 0.8);
  EXPECT_EQ(mean[1].label, 1);
  EXPECT_EQ(mean[0].subject_id, "s1");
  const auto max = aggregate_dataset(groups, VoteStrategy::max);
  EXPECT_EQ(max[0].score, 0.3);
  EXPECT_EQ(max[1].score, 0.8);
  EXPECT_EQ(max[1].strategy, VoteStrategy::max);
}

TEST(AggregateDataset, PublishedTestSubjects) {
  const auto groups = partition_and_group(testing::published_test_fixture());
  EXPECT_EQ(aggregate_dataset(groups, VoteStrategy::max).size(), 478u);
}

TEST(VoteProperty, WithinRangeAndPermutationInvariant) {
  Xoshiro256 rng(3);
  std::mt19937_64 shuffler(5);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> scores(1 + rng.below(8));
    for (auto& s : scores) s = rng.uniform();
    const double lo = *std::min_element(scores.begin(), scores.end());
    const double hi = *std::max_element(scores.begin(), scores.end());
    const double mx = vote(scores, VoteStrategy::max);
    const double mn = vote(scores, VoteStrategy::mean);
    EXPECT_GE(mn, lo);
    EXPECT_LE(mn, hi);
    EXPECT_EQ(mx, hi);
    EXPECT_GE(mx, mn);
    auto shuffled = scores;
    std::shuffle(shuffled.begin(), shuffled.end(), shuffler);
    EXPECT_EQ(vote(shuffled, VoteStrategy::mean), mn);
    EXPECT_EQ(vote(shuffled, VoteStrategy::max), mx);
  }
}

TEST(VoteProperty, EqualScoresGiveEqualVotes) {
  for (double v : {0.0, 0.1, 1.0 / 3.0, 0.7, 1.0}) {
    for (std::size_t n = 1; n <= 9; ++n) {
      const std::vector<double> scores(n, v);
      EXPECT_EQ(vote(scores, VoteStrategy::mean), v);
      EXPECT_EQ(vote(scores, VoteStrategy::max), v);
    }
  }
}

}  // namespace
}  // namespace screeneval
