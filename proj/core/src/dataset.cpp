#include "screeneval/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "screeneval/error.hpp"

namespace screeneval {

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "test";
}

std::optional<Split> parse_split(std::string_view text) {
  if (text == "train") return Split::train;
  if (text == "validation") return Split::validation;
  if (text == "test") return Split::test;
  return std::nullopt;
}

namespace {

std::string line_error(std::size_t line, std::string_view field, std::string_view what) {
  std::ostringstream os;
  os << "line " << line << ", field '" << field << "': " << what;
  return os.str();
}

std::optional<double> parse_double(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

Dataset parse_csv(std::istream& input, std::string provenance) {
  static constexpr std::string_view kFields[] = {"image_id", "subject_id", "cohort",
                                                 "split",    "label",      "score"};
  std::vector<PredictionRecord> records;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;

  while (std::getline(input, raw)) {
    ++line_no;
    std::string_view line = trim_cr(raw);
    if (!header_seen) {
      if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
      if (line != kCsvHeader) {
        throw Error(ErrorKind::parse, "line " + std::to_string(line_no) +
                                          ": expected header '" + std::string(kCsvHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;

    const auto fields = split_fields(line);
    if (fields.size() != 6) {
      throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": expected 6 fields, got " +
                                        std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < 3; ++i) {
      if (fields[i].empty()) throw Error(ErrorKind::parse, line_error(line_no, kFields[i], "empty value"));
    }

    PredictionRecord rec;
    rec.image_id = std::string(fields[0]);
    rec.subject_id = std::string(fields[1]);
    rec.cohort = std::string(fields[2]);

    const auto split = parse_split(fields[3]);
    if (!split) {
      throw Error(ErrorKind::parse,
                  line_error(line_no, "split", "unknown split '" + std::string(fields[3]) + "'"));
    }
    rec.split = *split;

    if (fields[4] == "0") {
      rec.label = 0;
    } else if (fields[4] == "1") {
      rec.label = 1;
    } else {
      throw Error(ErrorKind::parse,
                  line_error(line_no, "label", "expected 0 or 1, got '" + std::string(fields[4]) + "'"));
    }

    const auto score = parse_double(fields[5]);
    if (!score) {
      throw Error(ErrorKind::parse,
                  line_error(line_no, "score", "not a number: '" + std::string(fields[5]) + "'"));
    }
    rec.score = *score;
    records.push_back(std::move(rec));
  }

  if (!header_seen) throw Error(ErrorKind::parse, "missing header");
  if (records.empty()) throw Error(ErrorKind::parse, "no records");
  return Dataset(std::move(records), std::move(provenance));
}

std::string record_error(std::size_t index, std::string_view field, std::string_view what) {
  std::ostringstream os;
  os << "record " << index << ", field '" << field << "': " << what;
  return os.str();
}

std::string require_string(const nlohmann::json& obj, std::size_t index, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorKind::parse, record_error(index, key, "missing"));
  if (!it->is_string()) throw Error(ErrorKind::parse, record_error(index, key, "expected a string"));
  auto value = it->get<std::string>();
  if (value.empty()) throw Error(ErrorKind::parse, record_error(index, key, "empty value"));
  return value;
}

}  // namespace

Dataset dataset_from_json(const nlohmann::json& doc, std::string provenance) {
  if (!doc.is_array()) throw Error(ErrorKind::parse, "expected a JSON array of records");
  std::vector<PredictionRecord> records;
  records.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& obj = doc[i];
    if (!obj.is_object()) throw Error(ErrorKind::parse, "record " + std::to_string(i) + ": expected an object");
    PredictionRecord rec;
    rec.image_id = require_string(obj, i, "image_id");
    rec.subject_id = require_string(obj, i, "subject_id");
    rec.cohort = require_string(obj, i, "cohort");
    const auto split_text = require_string(obj, i, "split");
    const auto split = parse_split(split_text);
    if (!split) throw Error(ErrorKind::parse, record_error(i, "split", "unknown split '" + split_text + "'"));
    rec.split = *split;

    const auto label = obj.find("label");
    if (label == obj.end()) throw Error(ErrorKind::parse, record_error(i, "label", "missing"));
    if (!label->is_number_integer() || (label->get<long long>() != 0 && label->get<long long>() != 1)) {
      throw Error(ErrorKind::parse, record_error(i, "label", "expected 0 or 1"));
    }
    rec.label = label->get<int>();

    const auto score = obj.find("score");
    if (score == obj.end()) throw Error(ErrorKind::parse, record_error(i, "score", "missing"));
    if (!score->is_number()) throw Error(ErrorKind::parse, record_error(i, "score", "not a number"));
    rec.score = score->get<double>();
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw Error(ErrorKind::parse, "no records");
  return Dataset(std::move(records), std::move(provenance));
}

Dataset parse_records(std::istream& input, InputFormat format, std::string provenance) {
  if (format == InputFormat::csv) return parse_csv(input, std::move(provenance));
  nlohmann::json doc;
  try {
    input >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::parse, std::string("malformed JSON: ") + e.what());
  }
  return dataset_from_json(doc, std::move(provenance));
}

Dataset parse_records(std::string_view text, InputFormat format, std::string provenance) {
  std::istringstream in{std::string(text)};
  return parse_records(in, format, std::move(provenance));
}

std::optional<InputFormat> format_from_extension(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".csv") return InputFormat::csv;
  if (ext == ".json") return InputFormat::json;
  return std::nullopt;
}

Dataset load_dataset(const std::filesystem::path& path) {
  const auto format = format_from_extension(path);
  if (!format) throw Error(ErrorKind::invalid_argument, "cannot infer format from '" + path.string() + "'");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::missing_data, "cannot open '" + path.string() + "'");
  return parse_records(in, *format, path.filename().string());
}

namespace {

void append_double(std::string& out, double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, ptr);
}

}  // namespace

std::string to_csv(const Dataset& dataset) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : dataset.records()) {
    out += r.image_id;
    out += ',';
    out += r.subject_id;
    out += ',';
    out += r.cohort;
    out += ',';
    out += to_string(r.split);
    out += ',';
    out += r.label == 1 ? '1' : '0';
    out += ',';
    append_double(out, r.score);
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const Dataset& dataset) {
  auto doc = nlohmann::json::array();
  for (const auto& r : dataset.records()) {
    doc.push_back({{"image_id", r.image_id},
                   {"subject_id", r.subject_id},
                   {"cohort", r.cohort},
                   {"split", std::string(to_string(r.split))},
                   {"label", r.label},
                   {"score", r.score}});
  }
  return doc;
}

ValidationReport validate(const Dataset& dataset) {
  ValidationReport report;
  if (dataset.empty()) {
    report.violations.push_back({"empty_dataset", "", "no records"});
    return report;
  }

  std::unordered_set<std::string> seen_images;
  struct SubjectInfo {
    int label;
    std::string cohort;
    Split split;
    bool label_reported = false;
    bool cohort_reported = false;
    bool split_reported = false;
  };
  std::unordered_map<std::string, SubjectInfo> subjects;

  for (const auto& r : dataset.records()) {
    if (!(r.score >= 0.0 && r.score <= 1.0)) {
      report.violations.push_back({"score_out_of_range", r.image_id, "score out of [0,1]"});
    }
    if (r.label != 0 && r.label != 1) {
      report.violations.push_back({"label_not_binary", r.image_id, "label not in {0,1}"});
    }
    if (!seen_images.insert(r.image_id).second) {
      report.violations.push_back({"duplicate_image_id", r.image_id, "duplicate image_id"});
    }
    auto [it, inserted] = subjects.try_emplace(r.subject_id, SubjectInfo{r.label, r.cohort, r.split});
    if (inserted) continue;
    auto& info = it->second;
    if (info.label != r.label && !info.label_reported) {
      info.label_reported = true;
      report.violations.push_back({"inconsistent_label", r.subject_id, "inconsistent label"});
    }
    if (info.cohort != r.cohort && !info.cohort_reported) {
      info.cohort_reported = true;
      report.violations.push_back({"inconsistent_cohort", r.subject_id, "inconsistent cohort"});
    }
    if (info.split != r.split && !info.split_reported) {
      info.split_reported = true;
      report.violations.push_back({"inconsistent_split", r.subject_id, "inconsistent split"});
    }
  }
  return report;
}

nlohmann::json to_json(const ValidationReport& report) {
  auto list = nlohmann::json::array();
  for (const auto& v : report.violations) {
    list.push_back({{"kind", v.kind}, {"id", v.id}, {"message", v.message}});
  }
  return {{"violations", std::move(list)}, {"count", report.violations.size()}};
}

std::vector<SubjectGroup> partition_and_group(const Dataset& dataset, const GroupFilter& filter) {
  std::map<std::string, SubjectGroup> by_subject;
  for (const auto& r : dataset.records()) {
    if (filter.split && r.split != *filter.split) continue;
    if (filter.cohort && r.cohort != *filter.cohort) continue;
    auto [it, inserted] = by_subject.try_emplace(r.subject_id);
    auto& group = it->second;
    if (inserted) {
      group.subject_id = r.subject_id;
      group.label = r.label;
      group.cohort = r.cohort;
      group.split = r.split;
    }
    group.scores.push_back({r.image_id, r.score});
  }
  std::vector<SubjectGroup> groups;
  groups.reserve(by_subject.size());
  for (auto& [id, group] : by_subject) groups.push_back(std::move(group));
  return groups;
}

std::vector<std::string> cohorts_in_order(const Dataset& dataset) {
  std::vector<std::string> cohorts;
  std::unordered_set<std::string> seen;
  for (const auto& r : dataset.records()) {
    if (seen.insert(r.cohort).second) cohorts.push_back(r.cohort);
  }
  return cohorts;
}

}  // namespace screeneval
