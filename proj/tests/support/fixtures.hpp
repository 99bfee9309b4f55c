#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "screeneval/dataset.hpp"
#include "screeneval/bootstrap.hpp"
#include "screeneval/calibration.hpp"
#include "screeneval/metrics.hpp"
#include "screeneval/simulate.hpp"

namespace screeneval::testing {

// How many subjects/images of one (cohort, class) block land on the positive
// side of the fixture threshold under each decision level.
struct BlockCounts {
  std::size_t subjects = 0;
  std::size_t images = 0;
  std::size_t image_hits = 0;  // images scoring >= threshold
  std::size_t max_hits = 0;    // subjects whose max-vote >= threshold
  std::size_t mean_hits = 0;   // subjects whose mean-vote >= threshold
};

struct CohortBlocks {
  std::string name;
  BlockCounts positive;
  BlockCounts negative;
};

inline constexpr double kFixtureThreshold = 0.5;

// Test-split cohort shape (subjects/images per class and cohort) combined
// with the image-level, max-vote and mean-vote confusion counts published for
// the same test set.
std::vector<CohortBlocks> published_test_blocks();

// Builds records realizing every block's counts at threshold 0.5 (ge rule).
// Throws std::logic_error if a block's counts are not jointly realizable by
// the construction.
Dataset build_block_fixture(const std::vector<CohortBlocks>& cohorts, Split split, std::uint64_t seed,
                            const std::string& provenance);

// 2139 records / 478 subjects on the test split.
Dataset published_test_fixture();

// 2436 records / 657 subjects: train and validation splits with the
// published per-cohort split sizes. The validation split is perfectly
// separable and one positive subject scores exactly 0.5 on every image, so
// every calibration level lands on threshold 0.5.
Dataset published_development_fixture();

// Image, max and mean artifacts calibrated on the development fixture.
ArtifactSet published_artifacts();

// Scores realizing a confusion matrix at `threshold`.
std::vector<Scored> scored_from_counts(std::uint64_t tp, std::uint64_t fn, std::uint64_t fp, std::uint64_t tn,
                                       double threshold = kFixtureThreshold);

// Reference confusion rows and the corresponding published metric cells.
struct PublishedRow {
  std::string scope;
  std::string level;  // "image", "max", "mean"
  ConfusionMatrix counts;
  double sensitivity, specificity, accuracy, f1;
};
std::vector<PublishedRow> published_rows();

// One cohort "Sim", test split only, one image per subject, independent
// images (subject_effect 0), positive N(0.7, 0.2) and negative N(0.3, 0.2).
// Image-level AUC oracle: Phi(0.4 / sqrt(0.08)) = 0.9214.
SimConfig gaussian_config(std::size_t positives, std::size_t negatives, std::uint64_t seed);

// Every group of the dataset at image level, threshold 0.5.
EvaluationSlice image_slice(const Dataset& dataset);
EvaluationSlice subject_slice(const Dataset& dataset, VoteStrategy strategy, double threshold = kFixtureThreshold);

}  // namespace screeneval::testing
