#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "screeneval/dataset.hpp"

namespace screeneval {

enum class VoteStrategy { max, mean };

std::string_view to_string(VoteStrategy strategy);
/// Accepts the wire literals "max" and "mean".
std::optional<VoteStrategy> parse_strategy(std::string_view text);

/// Collapses one subject's image scores to a subject score. max returns the
/// largest score, mean the unweighted arithmetic mean. Throws on an empty
/// list ("no scores for subject").
double vote(std::span<const double> scores, VoteStrategy strategy);

struct SubjectScore {
  std::string subject_id;
  int label = 0;
  std::string cohort;
  VoteStrategy strategy = VoteStrategy::max;
  double score = 0.0;
};

/// One SubjectScore per group, in group order.
std::vector<SubjectScore> aggregate_dataset(std::span<const SubjectGroup> groups, VoteStrategy strategy);

}  // namespace screeneval
