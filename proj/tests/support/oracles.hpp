#pragma once

// Brute-force reference implementations. They share no code with the
// library and trade speed for obviousness.

#include <cstdint>
#include <limits>
#include <set>
#include <vector>

#include "screeneval/metrics.hpp"
#include "screeneval/rng.hpp"

namespace screeneval::oracles {

// Fraction of positive/negative pairs ordered correctly, ties counting half.
inline double pairwise_auc(const std::vector<Scored>& s) {
  std::uint64_t twice = 0, pos = 0, neg = 0;
  for (const auto& x : s) (x.label == 1 ? pos : neg) += 1;
  for (const auto& p : s) {
    if (p.label != 1) continue;
    for (const auto& n : s) {
      if (n.label != 0) continue;
      if (p.score > n.score) twice += 2;
      else if (p.score == n.score) twice += 1;
    }
  }
  return static_cast<double>(twice) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

// n items, both classes present, scores drawn from `levels` distinct values
// so ties are common when levels is small.
inline std::vector<Scored> random_scored(Xoshiro256& rng, std::uint64_t n, std::uint64_t levels) {
  if (n < 2) n = 2;
  std::vector<Scored> out(n);
  for (auto& x : out) {
    x.score = static_cast<double>(rng.below(levels) + 1) / static_cast<double>(levels + 1);
    x.label = static_cast<int>(rng.below(2));
  }
  out[0].label = 1;
  out[1].label = 0;
  return out;
}

struct F1Optimum {
  double f1 = -1.0;
  double threshold = 0.0;
};

// Every distinct score plus one value above all of them, evaluated by
// direct counting with a `score >= t` rule.
inline F1Optimum exhaustive_best_f1(const std::vector<Scored>& s) {
  std::set<double> candidates;
  for (const auto& x : s) candidates.insert(x.score);
  candidates.insert(std::numeric_limits<double>::infinity());
  F1Optimum best;
  for (double t : candidates) {
    std::uint64_t tp = 0, fp = 0, fn = 0;
    for (const auto& x : s) {
      const bool flagged = x.score >= t;
      if (flagged && x.label == 1) ++tp;
      if (flagged && x.label == 0) ++fp;
      if (!flagged && x.label == 1) ++fn;
    }
    const std::uint64_t denom = 2 * tp + fp + fn;
    const double f1 = denom == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(denom);
    if (f1 > best.f1 || (f1 == best.f1 && t > best.threshold)) best = {f1, t};
  }
  return best;
}

}  // namespace screeneval::oracles
