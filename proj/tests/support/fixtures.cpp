#include "fixtures.hpp"

#include <cstdio>
#include <stdexcept>

#include "screeneval/rng.hpp"

namespace screeneval::testing {

std::vector<CohortBlocks> published_test_blocks() {
  return {
      {"Shanghai", {29, 139, 99, 29, 25}, {99, 408, 22, 13, 3}},
      {"Hebei", {27, 135, 100, 26, 21}, {161, 805, 130, 43, 25}},
      {"Spain", {8, 28, 11, 6, 4}, {154, 624, 23, 12, 6}},
  };
}

namespace {

enum class Kind { mean_hit, max_only, none };

double uniform_in(Xoshiro256& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

char split_tag(Split split) {
  switch (split) {
    case Split::train: return 'T';
    case Split::validation: return 'V';
    case Split::test: return 'E';
  }
  return 'E';
}

// Score bands (threshold 0.5, ge rule):
//   mean_hit subjects: highs in [0.9, 1.0), lows in [0.45, 0.49): mean >= 0.5 while lows <= 8 * highs
//   max_only subjects: highs in [0.5, 0.6), lows in [0.0, 0.1):  mean <  0.5 while highs < 4 * lows
//   none subjects: every image in [0.0, 0.45)
void build_block(const std::string& cohort, bool positive, const BlockCounts& b, Split split, Xoshiro256& rng,
                 std::vector<PredictionRecord>& out) {
  const std::size_t S = b.subjects, I = b.images, a = b.image_hits, m = b.max_hits, k = b.mean_hits;
  if (S == 0) return;
  auto fail = [&](const char* what) {
    throw std::logic_error(cohort + (positive ? " positive" : " negative") + " block: " + what);
  };
  if (k > m || m > S || a < m || I < S) fail("inconsistent counts");
  if (I - a < (m - k) + (S - m)) fail("not enough low-scoring images");

  std::vector<Kind> kinds;
  for (std::size_t i = 0; i < S; ++i) kinds.push_back(i < k ? Kind::mean_hit : (i < m ? Kind::max_only : Kind::none));

  std::vector<std::size_t> highs(S, 0), lows(S, 0);
  for (std::size_t i = 0; i < S; ++i) {
    if (kinds[i] != Kind::none) highs[i] = 1;
    if (kinds[i] != Kind::mean_hit) lows[i] = 1;
  }
  std::size_t extra_highs = a - m;
  std::size_t extra_lows = (I - a) - ((m - k) + (S - m));

  std::vector<std::size_t> high_targets, low_targets;
  for (std::size_t i = 0; i < S; ++i) {
    if (kinds[i] == Kind::mean_hit) high_targets.push_back(i);
    if (kinds[i] != Kind::mean_hit) low_targets.push_back(i);
  }
  if (high_targets.empty()) {
    for (std::size_t i = 0; i < S; ++i)
      if (kinds[i] == Kind::max_only) high_targets.push_back(i);
  }
  if (low_targets.empty()) low_targets = high_targets;
  if (extra_highs > 0 && high_targets.empty()) fail("no subject can take extra high images");
  for (std::size_t j = 0; j < extra_highs; ++j) ++highs[high_targets[j % high_targets.size()]];
  for (std::size_t j = 0; j < extra_lows; ++j) ++lows[low_targets[j % low_targets.size()]];

  for (std::size_t i = 0; i < S; ++i) {
    if (kinds[i] == Kind::mean_hit && lows[i] > 8 * highs[i]) fail("mean-hit subject has too many lows");
    if (kinds[i] == Kind::max_only && highs[i] >= 4 * lows[i]) fail("max-only subject has too many highs");
  }

  for (std::size_t i = 0; i < S; ++i) {
    char id[64];
    std::snprintf(id, sizeof id, "%s-%c%c%03zu", cohort.c_str(), split_tag(split), positive ? 'P' : 'N', i);
    const std::string subject = id;
    std::size_t image = 0;
    auto emit = [&](double score) {
      out.push_back({subject + "-" + std::to_string(image++), subject, cohort, split, positive ? 1 : 0, score});
    };
    for (std::size_t h = 0; h < highs[i]; ++h) {
      emit(kinds[i] == Kind::mean_hit ? uniform_in(rng, 0.9, 1.0) : uniform_in(rng, 0.5, 0.6));
    }
    for (std::size_t l = 0; l < lows[i]; ++l) {
      switch (kinds[i]) {
        case Kind::mean_hit: emit(uniform_in(rng, 0.45, 0.49)); break;
        case Kind::max_only: emit(uniform_in(rng, 0.0, 0.1)); break;
        case Kind::none: emit(uniform_in(rng, 0.0, 0.45)); break;
      }
    }
  }
}

void append_blocks(const std::vector<CohortBlocks>& cohorts, Split split, Xoshiro256& rng,
                   std::vector<PredictionRecord>& out) {
  for (const auto& c : cohorts) {
    build_block(c.name, true, c.positive, split, rng, out);
    build_block(c.name, false, c.negative, split, rng, out);
  }
}

BlockCounts separated_positive(std::size_t subjects, std::size_t images) {
  return {subjects, images, images, subjects, subjects};
}

BlockCounts separated_negative(std::size_t subjects, std::size_t images) { return {subjects, images, 0, 0, 0}; }

}  // namespace

Dataset build_block_fixture(const std::vector<CohortBlocks>& cohorts, Split split, std::uint64_t seed,
                            const std::string& provenance) {
  Xoshiro256 rng(seed);
  std::vector<PredictionRecord> records;
  append_blocks(cohorts, split, rng, records);
  return Dataset(std::move(records), provenance);
}

Dataset published_test_fixture() {
  return build_block_fixture(published_test_blocks(), Split::test, 20210611, "published-test-fixture");
}

Dataset published_development_fixture() {
  const std::vector<CohortBlocks> train{
      {"Shanghai", separated_positive(83, 290), separated_negative(272, 958)},
      {"Hebei", separated_positive(14, 68), separated_negative(0, 0)},
      {"Spain", separated_positive(22, 96), separated_negative(119, 482)},
  };
  const std::vector<CohortBlocks> validation{
      {"Shanghai", separated_positive(21, 77), separated_negative(70, 236)},
      {"Hebei", separated_positive(6, 33), separated_negative(0, 0)},
      {"Spain", separated_positive(9, 36), separated_negative(41, 160)},
  };
  Xoshiro256 rng(20200401);
  std::vector<PredictionRecord> records;
  append_blocks(train, Split::train, rng, records);
  append_blocks(validation, Split::validation, rng, records);

  // Pin the lowest positive validation score at exactly 0.5 for every level.
  const std::string pinned = "Shanghai-VP000";
  for (auto& r : records) {
    if (r.subject_id == pinned) r.score = 0.5;
  }
  return Dataset(std::move(records), "published-development-fixture");
}

ArtifactSet published_artifacts() {
  const auto dev = published_development_fixture();
  ArtifactSet set;
  set.add(calibrate(dev, Level::image, std::nullopt));
  set.add(calibrate(dev, Level::subject, VoteStrategy::max));
  set.add(calibrate(dev, Level::subject, VoteStrategy::mean));
  return set;
}

std::vector<Scored> scored_from_counts(std::uint64_t tp, std::uint64_t fn, std::uint64_t fp, std::uint64_t tn,
                                       double threshold) {
  std::vector<Scored> out;
  Xoshiro256 rng(tp * 1000003 + fn * 10007 + fp * 101 + tn);
  auto above = [&] { return threshold + (1.0 - threshold) * rng.uniform(); };
  auto below = [&] { return threshold * rng.uniform(); };
  for (std::uint64_t i = 0; i < tp; ++i) out.push_back({above(), 1});
  for (std::uint64_t i = 0; i < fn; ++i) out.push_back({below(), 1});
  for (std::uint64_t i = 0; i < fp; ++i) out.push_back({above(), 0});
  for (std::uint64_t i = 0; i < tn; ++i) out.push_back({below(), 0});
  return out;
}

std::vector<PublishedRow> published_rows() {
  return {
      {"Shanghai", "image", {99, 40, 22, 386}, 0.712, 0.946, 0.887, 0.762},
      {"Shanghai", "max", {29, 0, 13, 86}, 1.000, 0.869, 0.898, 0.817},
      {"Shanghai", "mean", {25, 4, 3, 96}, 0.862, 0.970, 0.945, 0.877},
      {"Hebei", "image", {100, 35, 130, 675}, 0.741, 0.839, 0.824, 0.548},
      {"Hebei", "max", {26, 1, 43, 118}, 0.963, 0.733, 0.766, 0.542},
      {"Hebei", "mean", {21, 6, 25, 136}, 0.778, 0.845, 0.835, 0.575},
      {"Spain", "image", {11, 17, 23, 601}, 0.393, 0.963, 0.938, 0.355},
      {"Spain", "max", {6, 2, 12, 142}, 0.750, 0.922, 0.914, 0.462},
      {"Spain", "mean", {4, 4, 6, 148}, 0.500, 0.961, 0.938, 0.444},
      {"Total", "image", {210, 92, 175, 1662}, 0.695, 0.904, 0.875, 0.611},
      {"Total", "max", {61, 3, 68, 346}, 0.953, 0.836, 0.851, 0.632},
      {"Total", "mean", {50, 14, 34, 380}, 0.781, 0.918, 0.900, 0.676},
  };
}

SimConfig gaussian_config(std::size_t positives, std::size_t negatives, std::uint64_t seed) {
  SimConfig cfg;
  cfg.cohorts = {{"Sim", positives, negatives}};
  cfg.images_lo = cfg.images_hi = 1;
  cfg.subject_effect = 0.0;
  cfg.split_fractions = {0.0, 0.0, 1.0};
  cfg.seed = seed;
  return cfg;
}

EvaluationSlice image_slice(const Dataset& dataset) {
  return {partition_and_group(dataset), Level::image, std::nullopt, {kFixtureThreshold, ThresholdMode::ge}};
}

EvaluationSlice subject_slice(const Dataset& dataset, VoteStrategy strategy, double threshold) {
  return {partition_and_group(dataset), Level::subject, strategy, {threshold, ThresholdMode::ge}};
}

}  // namespace screeneval::testing
