#include "screeneval/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "screeneval/error.hpp"

namespace screeneval {

namespace {

std::string selection_key(const Selection& s) {
  if (s.level == Level::image) return "image";
  return "subject/" + std::string(to_string(*s.strategy));
}

std::string selection_label(const Selection& s) {
  if (s.level == Level::image) return "image";
  return "subject(" + std::string(to_string(*s.strategy)) + ")";
}

std::vector<Selection> resolve_selections(const ArtifactSet& artifacts, const ReportOptions& options) {
  if (!options.selections.empty()) {
    for (const auto& s : options.selections) {
      if ((s.level == Level::subject) != s.strategy.has_value()) {
        throw Error(ErrorKind::invalid_argument, "a strategy is required exactly for subject-level selections");
      }
      if (!artifacts.find(s.level, s.strategy)) {
        throw Error(ErrorKind::missing_data, "no calibration artifact for " + selection_label(s));
      }
    }
    return options.selections;
  }
  std::vector<Selection> out;
  const Selection canonical[] = {{Level::image, std::nullopt},
                                 {Level::subject, VoteStrategy::max},
                                 {Level::subject, VoteStrategy::mean}};
  for (const auto& s : canonical) {
    if (artifacts.find(s.level, s.strategy)) out.push_back(s);
  }
  if (out.empty()) throw Error(ErrorKind::missing_data, "no calibration artifacts supplied");
  return out;
}

struct Scope {
  std::string name;
  std::optional<std::string> cohort;
};

std::vector<Scope> resolve_scopes(const Dataset& test, const ReportOptions& options) {
  std::vector<Scope> scopes;
  std::vector<std::string> cohorts = options.cohorts;
  if (cohorts.empty()) {
    GroupFilter filter{options.split, std::nullopt};
    std::vector<PredictionRecord> kept;
    for (const auto& r : test.records()) {
      if (!filter.split || r.split == *filter.split) kept.push_back(r);
    }
    cohorts = cohorts_in_order(Dataset(std::move(kept)));
  }
  for (const auto& c : cohorts) scopes.push_back({c, c});
  scopes.push_back({kTotalScope, std::nullopt});
  return scopes;
}

std::size_t image_count(const std::vector<SubjectGroup>& groups) {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.scores.size();
  return n;
}

bool both_classes(const ConfusionMatrix& c) { return c.positives() > 0 && c.negatives() > 0; }

std::optional<double> pct(std::uint64_t part, std::uint64_t whole) {
  if (whole == 0) return std::nullopt;
  return std::round(1000.0 * static_cast<double>(part) / static_cast<double>(whole)) / 10.0;
}

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json counts_json(const ConfusionMatrix& c) {
  return {{"tp", c.tp}, {"fn", c.fn}, {"fp", c.fp}, {"tn", c.tn}};
}

nlohmann::json strategy_json(const Selection& s) {
  return s.strategy ? nlohmann::json(std::string(to_string(*s.strategy))) : nlohmann::json(nullptr);
}

}  // namespace

const IntervalEstimate& ReportRow::metric(Metric m) const {
  if (metrics.empty()) throw Error(ErrorKind::undefined_metric, "row '" + scope + "' is not computable");
  return metrics.at(static_cast<std::size_t>(m));
}

PerformanceReport build_performance_report(const Dataset& test, const ArtifactSet& artifacts,
                                           const BootstrapConfig& cfg, const ReportOptions& options) {
  cfg.validate();
  PerformanceReport report;
  report.bootstrap = cfg;
  report.provenance = test.provenance();

  const auto selections = resolve_selections(artifacts, options);
  for (const auto& s : selections) report.artifacts.push_back(*artifacts.find(s.level, s.strategy));

  if (partition_and_group(test, GroupFilter{options.split, std::nullopt}).empty()) {
    throw Error(ErrorKind::missing_data, "no records in the evaluated split");
  }

  for (const auto& scope : resolve_scopes(test, options)) {
    auto groups = partition_and_group(test, GroupFilter{options.split, scope.cohort});
    if (groups.empty()) {
      report.notices.push_back("scope '" + scope.name + "' has no records; omitted");
      continue;
    }
    for (const auto& selection : selections) {
      const auto* artifact = artifacts.find(selection.level, selection.strategy);
      ReportRow row;
      row.scope = scope.name;
      row.selection = selection;
      row.rule = artifact->rule();
      row.images = image_count(groups);
      row.subjects = groups.size();

      EvaluationSlice slice{groups, selection.level, selection.strategy, row.rule};
      row.counts = confusion_at(slice.scored(), row.rule);
      if (!both_classes(row.counts)) {
        row.notice = "not computable: only one class present";
      } else {
        row.metrics = bootstrap_ci(slice, kAllMetrics, cfg);
        if (row.metrics.front().exclusion_warning()) {
          row.notice = "more than 1% of bootstrap replicates lacked a class and were excluded";
        }
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

nlohmann::json to_json(const PerformanceReport& report) {
  auto rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json r;
    r["scope"] = row.scope;
    r["level"] = std::string(to_string(row.selection.level));
    r["strategy"] = strategy_json(row.selection);
    r["threshold"] = row.rule.threshold;
    r["images"] = row.images;
    r["subjects"] = row.subjects;
    r["counts"] = counts_json(row.counts);
    if (row.computable()) {
      nlohmann::json metrics = nlohmann::json::object();
      for (Metric m : kAllMetrics) {
        const auto& est = row.metric(m);
        metrics[std::string(to_string(m))] = {{"point", est.point},
                                               {"lower", est.lower},
                                               {"upper", est.upper},
                                               {"excluded_replicates", est.excluded_replicates}};
      }
      r["metrics"] = std::move(metrics);
    } else {
      r["metrics"] = nullptr;
    }
    r["notice"] = row.notice.empty() ? nlohmann::json(nullptr) : nlohmann::json(row.notice);
    rows.push_back(std::move(r));
  }

  nlohmann::json thresholds = nlohmann::json::object();
  for (const auto& a : report.artifacts) {
    thresholds[selection_key({a.level, a.strategy})] = {{"threshold", a.threshold},
                                                        {"mode", std::string(to_string(a.mode))},
                                                        {"achieved_f1", a.achieved_f1},
                                                        {"created_from", a.created_from}};
  }

  return {{"rows", std::move(rows)},
          {"thresholds", std::move(thresholds)},
          {"bootstrap",
           {{"replicates", report.bootstrap.replicates},
            {"confidence", report.bootstrap.confidence},
            {"seed", report.bootstrap.seed},
            {"unit", std::string(to_string(report.bootstrap.unit))}}},
          {"provenance", report.provenance},
          {"notices", report.notices}};
}

std::string serialize(const PerformanceReport& report) { return to_json(report).dump(2) + "\n"; }

std::string render_text(const PerformanceReport& report) {
  std::ostringstream os;
  char line[512];
  std::snprintf(line, sizeof line, "%-12s %-15s %-20s %-20s %-20s %-20s %-20s\n", "Scope", "Level", "AUC(95% CI)",
                "Sensitivity", "Specificity", "ACC", "F1");
  os << line;
  for (const auto& row : report.rows) {
    if (!row.computable()) {
      std::snprintf(line, sizeof line, "%-12s %-15s %s\n", row.scope.c_str(), selection_label(row.selection).c_str(),
                    row.notice.c_str());
      os << line;
      continue;
    }
    std::snprintf(line, sizeof line, "%-12s %-15s %-20s %-20s %-20s %-20s %-20s\n", row.scope.c_str(),
                  selection_label(row.selection).c_str(), format_interval(row.metric(Metric::auc)).c_str(),
                  format_interval(row.metric(Metric::sensitivity)).c_str(),
                  format_interval(row.metric(Metric::specificity)).c_str(),
                  format_interval(row.metric(Metric::accuracy)).c_str(),
                  format_interval(row.metric(Metric::f1)).c_str());
    os << line;
  }
  for (const auto& a : report.artifacts) {
    std::snprintf(line, sizeof line, "threshold %-15s %.6g (%s)\n", selection_label({a.level, a.strategy}).c_str(),
                  a.threshold, std::string(to_string(a.mode)).c_str());
    os << line;
  }
  for (const auto& n : report.notices) os << "note: " << n << '\n';
  return os.str();
}

ConfusionReport build_confusion_report(const Dataset& test, const ArtifactSet& artifacts,
                                       const ReportOptions& options) {
  ConfusionReport report;
  const auto selections = resolve_selections(artifacts, options);
  for (const auto& scope : resolve_scopes(test, options)) {
    auto groups = partition_and_group(test, GroupFilter{options.split, scope.cohort});
    if (groups.empty()) {
      report.notices.push_back("scope '" + scope.name + "' has no records; omitted");
      continue;
    }
    for (const auto& selection : selections) {
      const auto* artifact = artifacts.find(selection.level, selection.strategy);
      EvaluationSlice slice{std::move(groups), selection.level, selection.strategy, artifact->rule()};
      ConfusionRow row;
      row.scope = scope.name;
      row.selection = selection;
      row.counts = confusion_at(slice.scored(), slice.rule);
      row.tp_pct = pct(row.counts.tp, row.counts.positives());
      row.fn_pct = pct(row.counts.fn, row.counts.positives());
      row.fp_pct = pct(row.counts.fp, row.counts.negatives());
      row.tn_pct = pct(row.counts.tn, row.counts.negatives());
      groups = std::move(slice.groups);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

nlohmann::json to_json(const ConfusionReport& report) {
  auto rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"scope", row.scope},
                    {"level", std::string(to_string(row.selection.level))},
                    {"strategy", strategy_json(row.selection)},
                    {"counts", counts_json(row.counts)},
                    {"positive_row", {{"P", row.counts.tp}, {"N", row.counts.fn},
                                      {"P_pct", optional_number(row.tp_pct)}, {"N_pct", optional_number(row.fn_pct)}}},
                    {"negative_row", {{"P", row.counts.fp}, {"N", row.counts.tn},
                                      {"P_pct", optional_number(row.fp_pct)}, {"N_pct", optional_number(row.tn_pct)}}}});
  }
  return {{"rows", std::move(rows)}, {"notices", report.notices}};
}

std::string render_text(const ConfusionReport& report) {
  std::ostringstream os;
  char line[256];
  auto pct_text = [](const std::optional<double>& v) {
    if (!v) return std::string("-");
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.1f", *v);
    return std::string(buf);
  };
  std::snprintf(line, sizeof line, "%-12s %-15s %-5s %8s %8s %8s %8s\n", "Scope", "Level", "GT", "P", "N", "P(%)",
                "N(%)");
  os << line;
  for (const auto& row : report.rows) {
    const auto label = selection_label(row.selection);
    std::snprintf(line, sizeof line, "%-12s %-15s %-5s %8llu %8llu %8s %8s\n", row.scope.c_str(), label.c_str(), "P",
                  static_cast<unsigned long long>(row.counts.tp), static_cast<unsigned long long>(row.counts.fn),
                  pct_text(row.tp_pct).c_str(), pct_text(row.fn_pct).c_str());
    os << line;
    std::snprintf(line, sizeof line, "%-12s %-15s %-5s %8llu %8llu %8s %8s\n", "", "", "N",
                  static_cast<unsigned long long>(row.counts.fp), static_cast<unsigned long long>(row.counts.tn),
                  pct_text(row.fp_pct).c_str(), pct_text(row.tn_pct).c_str());
    os << line;
  }
  for (const auto& n : report.notices) os << "note: " << n << '\n';
  return os.str();
}

namespace {

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_roc_svg(const RocCurve& curve, const std::string& title) {
  constexpr double kMargin = 50.0;
  constexpr double kSide = 400.0;
  auto x = [&](double fpr) { return kMargin + fpr * kSide; };
  auto y = [&](double tpr) { return kMargin + (1.0 - tpr) * kSide; };

  std::ostringstream os;
  char buf[256];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"500\" height=\"520\" viewBox=\"0 0 500 520\">\n";
  os << "  <rect x=\"50\" y=\"50\" width=\"400\" height=\"400\" fill=\"none\" stroke=\"#000\"/>\n";
  os << "  <line x1=\"50\" y1=\"450\" x2=\"450\" y2=\"50\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = tick * 0.25;
    std::snprintf(buf, sizeof buf,
                  "  <text x=\"%.3f\" y=\"470\" font-size=\"11\" text-anchor=\"middle\">%.2f</text>\n"
                  "  <text x=\"40\" y=\"%.3f\" font-size=\"11\" text-anchor=\"end\">%.2f</text>\n",
                  x(v), v, y(v) + 4.0, v);
    os << buf;
  }
  os << "  <text x=\"250\" y=\"495\" font-size=\"13\" text-anchor=\"middle\">False positive rate</text>\n";
  os << "  <text x=\"15\" y=\"250\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 15 250)\">"
        "True positive rate</text>\n";
  os << "  <text x=\"250\" y=\"30\" font-size=\"14\" text-anchor=\"middle\">" << xml_escape(title) << "</text>\n";
  os << "  <polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", i == 0 ? "" : " ", x(curve.points[i].fpr), y(curve.points[i].tpr));
    os << buf;
  }
  os << "\"/>\n";
  std::snprintf(buf, sizeof buf, "  <text x=\"440\" y=\"435\" font-size=\"13\" text-anchor=\"end\">AUC = %.3f</text>\n",
                curve.auc);
  os << buf;
  os << "</svg>\n";
  return os.str();
}

RocExport export_roc(const Dataset& test, Level level, std::optional<VoteStrategy> strategy, const GroupFilter& filter) {
  if ((level == Level::subject) != strategy.has_value()) {
    throw Error(ErrorKind::invalid_argument, "a strategy is required exactly for subject-level ROC");
  }
  EvaluationSlice slice{partition_and_group(test, filter), level, strategy, {}};
  const auto scored = slice.scored();
  RocExport out;
  out.curve = roc_points(scored);
  out.csv = roc_to_csv(out.curve);

  std::string title = "ROC " + selection_label({level, strategy});
  if (filter.cohort) title += " " + *filter.cohort;
  out.svg = render_roc_svg(out.curve, title);
  return out;
}

}  // namespace screeneval
