#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "screeneval/dataset.hpp"

namespace screeneval {

/// Latent Gaussian for one class; image scores are clamped to [0,1].
struct ClassModel {
  double mean = 0.5;
  double sd = 0.1;
};

struct CohortCounts {
  std::string name;
  std::size_t positive = 0;
  std::size_t negative = 0;
};

struct SimConfig {
  std::vector<CohortCounts> cohorts;
  std::size_t images_lo = 3;
  std::size_t images_hi = 5;
  ClassModel positive{0.7, 0.2};
  ClassModel negative{0.3, 0.2};
  /// Weight of the per-subject latent in each image score; the remainder is
  /// a fresh per-image draw from the same class model.
  double subject_effect = 0.5;
  std::array<double, 3> split_fractions{0.6, 0.2, 0.2};  ///< train, validation, test
  std::uint64_t seed = 0;

  void validate() const;
};

/// Deterministic in cfg (seed included). Subject k (global index over
/// cohorts, positives before negatives) draws from Xoshiro256::stream(seed, k).
/// Splits are assigned per (cohort, class) block by largest-remainder
/// rounding of split_fractions, train first, then validation, then test.
Dataset simulate_cohort(const SimConfig& cfg);

/// Closed-form image-level AUC of the unclamped model:
///   Phi((mu1 - mu0) / sqrt((sd0^2 + sd1^2) * (e^2 + (1-e)^2)))
/// with e = subject_effect (e = 0 gives Phi(dmu / sqrt(sd0^2 + sd1^2))).
/// Clamping only matters for pairs that are both clamped to the same bound;
/// throws Error(oracle_inapplicable) when that can move the AUC by more than
/// kClampTolerance.
double theoretical_auc(const SimConfig& cfg);

inline constexpr double kClampTolerance = 1e-3;

SimConfig sim_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SimConfig& cfg);

double standard_normal_cdf(double x);

}  // namespace screeneval
