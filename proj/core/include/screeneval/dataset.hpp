#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace screeneval {

enum class Split { train, validation, test };

std::string_view to_string(Split split);
std::optional<Split> parse_split(std::string_view text);

/// One photograph's classifier output plus the metadata needed to slice it.
struct PredictionRecord {
  std::string image_id;
  std::string subject_id;
  std::string cohort;
  Split split = Split::test;
  int label = 0;  ///< 1 = positive, 0 = control
  double score = 0.0;

  bool operator==(const PredictionRecord&) const = default;
};

/// An ordered, immutable collection of prediction records.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<PredictionRecord> records, std::string provenance = {})
      : records_(std::move(records)), provenance_(std::move(provenance)) {}

  const std::vector<PredictionRecord>& records() const noexcept { return records_; }
  const std::string& provenance() const noexcept { return provenance_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

 private:
  std::vector<PredictionRecord> records_;
  std::string provenance_;
};

enum class InputFormat { csv, json };

inline constexpr std::string_view kCsvHeader = "image_id,subject_id,cohort,split,label,score";

// Parsing rejects structurally malformed input (wrong header, missing
// fields, unknown split, non-binary label, unparseable score) with an Error
// naming the line and field. Range and consistency problems are left to
// validate().
Dataset parse_records(std::istream& input, InputFormat format, std::string provenance = {});
Dataset parse_records(std::string_view text, InputFormat format, std::string provenance = {});
Dataset dataset_from_json(const nlohmann::json& doc, std::string provenance = {});

/// Reads a dataset, choosing csv or json from the file extension.
Dataset load_dataset(const std::filesystem::path& path);
std::optional<InputFormat> format_from_extension(const std::filesystem::path& path);

/// Scores are written in shortest round-trip form so that re-parsing yields
/// identical values.
std::string to_csv(const Dataset& dataset);
nlohmann::json to_json(const Dataset& dataset);

struct Violation {
  std::string kind;  ///< e.g. "score_out_of_range", "inconsistent_label"
  std::string id;    ///< offending image_id or subject_id
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
};

ValidationReport validate(const Dataset& dataset);
nlohmann::json to_json(const ValidationReport& report);

struct ScoredImage {
  std::string image_id;
  double score = 0.0;
};

/// All records of one subject: the unit of voting.
struct SubjectGroup {
  std::string subject_id;
  int label = 0;
  std::string cohort;
  Split split = Split::test;
  std::vector<ScoredImage> scores;
};

struct GroupFilter {
  std::optional<Split> split;
  std::optional<std::string> cohort;
};

/// Filters records then groups them by subject. Groups are sorted by
/// subject_id; scores inside a group keep input order.
std::vector<SubjectGroup> partition_and_group(const Dataset& dataset, const GroupFilter& filter = {});

/// Distinct cohorts in order of first appearance.
std::vector<std::string> cohorts_in_order(const Dataset& dataset);

}  // namespace screeneval
