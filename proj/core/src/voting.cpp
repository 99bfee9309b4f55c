#include "screeneval/voting.hpp"

#include <algorithm>
#include <vector>

#include "screeneval/error.hpp"

namespace screeneval {

std::string_view to_string(VoteStrategy strategy) {
  return strategy == VoteStrategy::max ? "max" : "mean";
}

std::optional<VoteStrategy> parse_strategy(std::string_view text) {
  if (text == "max") return VoteStrategy::max;
  if (text == "mean") return VoteStrategy::mean;
  return std::nullopt;
}

double vote(std::span<const double> scores, VoteStrategy strategy) {
  if (scores.empty()) throw Error(ErrorKind::invalid_argument, "no scores for subject");
  if (strategy == VoteStrategy::max) return *std::max_element(scores.begin(), scores.end());

  // Summing in sorted order makes the result independent of input order.
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double s : sorted) sum += s;
  // Rounding can land one ulp outside [min, max] when all scores are equal.
  return std::clamp(sum / static_cast<double>(sorted.size()), sorted.front(), sorted.back());
}

std::vector<SubjectScore> aggregate_dataset(std::span<const SubjectGroup> groups, VoteStrategy strategy) {
  std::vector<SubjectScore> out;
  out.reserve(groups.size());
  std::vector<double> buffer;
  for (const auto& g : groups) {
    buffer.clear();
    for (const auto& s : g.scores) buffer.push_back(s.score);
    out.push_back({g.subject_id, g.label, g.cohort, strategy, vote(buffer, strategy)});
  }
  return out;
}

}  // namespace screeneval
