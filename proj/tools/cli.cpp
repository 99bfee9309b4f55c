#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "screeneval/bootstrap.hpp"
#include "screeneval/calibration.hpp"
#include "screeneval/dataset.hpp"
#include "screeneval/error.hpp"
#include "screeneval/report.hpp"
#include "screeneval/service.hpp"
#include "screeneval/simulate.hpp"

namespace screeneval::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string input;
  std::string format;
  std::string out;
  std::string svg_out;
  std::string confusion_out;
  std::string config;
  std::vector<std::string> artifacts;
  std::optional<std::uint64_t> seed;
  std::size_t replicates = 1000;
  double confidence = 0.95;
  std::string unit = "photo";
  std::string level;
  std::string strategy;
  std::vector<std::string> cohorts;
  std::string split = "test";
  std::string threshold_mode;
  bool json = false;
  std::string listen = "127.0.0.1:8080";
  std::size_t max_body_bytes = 32u << 20;
  std::size_t max_replicates = 10000;
};

// Raised for semantically invalid flag values that CLI11 cannot catch.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Dataset read_input(const Options& o) {
  if (o.format.empty()) return load_dataset(o.input);
  const auto format = o.format == "csv" ? InputFormat::csv : InputFormat::json;
  std::ifstream in(o.input, std::ios::binary);
  if (!in) throw Error(ErrorKind::missing_data, "cannot open '" + o.input + "'");
  return parse_records(in, format, fs::path(o.input).filename().string());
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::missing_data, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorKind::missing_data, "failed writing '" + path + "'");
}

std::optional<Level> level_flag(const Options& o) {
  if (o.level.empty()) return std::nullopt;
  return parse_level(o.level);
}

std::optional<VoteStrategy> strategy_flag(const Options& o) {
  if (o.strategy.empty()) return std::nullopt;
  return parse_strategy(o.strategy);
}

std::optional<Split> split_flag(const Options& o) {
  if (o.split == "all") return std::nullopt;
  return parse_split(o.split);
}

ArtifactSet read_artifacts(const Options& o) {
  std::vector<fs::path> paths(o.artifacts.begin(), o.artifacts.end());
  auto set = load_artifacts(paths);
  if (!o.threshold_mode.empty()) {
    const auto mode = *parse_threshold_mode(o.threshold_mode);
    ArtifactSet overridden;
    for (auto a : set.all()) {
      a.mode = mode;
      overridden.add(std::move(a));
    }
    return overridden;
  }
  return set;
}

// Refuses to evaluate data that fails validation; prints the report to err.
bool require_valid(const Dataset& d, std::ostream& err) {
  const auto report = validate(d);
  if (report.ok()) return true;
  err << report.violations.size() << " violations\n";
  for (const auto& v : report.violations) err << "  " << v.kind << " " << v.id << ": " << v.message << '\n';
  return false;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto d = read_input(o);
  const auto report = validate(d);
  if (o.json) {
    out << to_json(report).dump(2) << '\n';
  } else {
    (report.ok() ? out : err) << report.violations.size() << " violations\n";
    for (const auto& v : report.violations) err << "  " << v.kind << " " << v.id << ": " << v.message << '\n';
  }
  return report.ok() ? 0 : 1;
}

int cmd_calibrate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto d = read_input(o);
  if (!require_valid(d, err)) return 1;
  const auto mode = o.threshold_mode.empty() ? ThresholdMode::ge : *parse_threshold_mode(o.threshold_mode);

  Dataset scoped = d;
  if (!o.cohorts.empty()) {
    std::vector<PredictionRecord> kept;
    for (const auto& r : d.records()) {
      if (std::find(o.cohorts.begin(), o.cohorts.end(), r.cohort) != o.cohorts.end()) kept.push_back(r);
    }
    scoped = Dataset(std::move(kept), d.provenance());
  }

  nlohmann::json doc;
  const auto level = level_flag(o);
  if (level) {
    if (*level == Level::subject && o.strategy.empty()) throw UsageError("--level subject requires --strategy");
    if (*level == Level::image && !o.strategy.empty()) throw UsageError("--level image takes no --strategy");
    doc = to_json(calibrate(scoped, *level, strategy_flag(o), mode));
  } else {
    if (!o.strategy.empty()) throw UsageError("--strategy requires --level subject");
    ArtifactSet set;
    set.add(calibrate(scoped, Level::image, std::nullopt, mode));
    set.add(calibrate(scoped, Level::subject, VoteStrategy::max, mode));
    set.add(calibrate(scoped, Level::subject, VoteStrategy::mean, mode));
    doc = to_json(set);
  }
  const std::string text = doc.dump(2) + "\n";
  if (!o.out.empty()) write_file(o.out, text);
  if (o.json || o.out.empty()) out << text;
  return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto d = read_input(o);
  if (!require_valid(d, err)) return 1;
  const auto artifacts = read_artifacts(o);

  BootstrapConfig cfg;
  cfg.replicates = o.replicates;
  cfg.confidence = o.confidence;
  cfg.seed = o.seed.value_or(0);
  cfg.unit = *parse_unit(o.unit);

  ReportOptions options;
  options.split = split_flag(o);
  options.cohorts = o.cohorts;
  const auto report = build_performance_report(d, artifacts, cfg, options);
  const auto bytes = serialize(report);
  if (!o.out.empty()) write_file(o.out, bytes);
  if (!o.confusion_out.empty()) {
    write_file(o.confusion_out, to_json(build_confusion_report(d, artifacts, options)).dump(2) + "\n");
  }
  if (o.json) {
    out << bytes;
  } else {
    out << render_text(report);
    out << '\n' << render_text(build_confusion_report(d, artifacts, options));
  }
  for (const auto& row : report.rows) {
    if (!row.notice.empty()) err << "warning: " << row.scope << ": " << row.notice << '\n';
  }
  return 0;
}

int cmd_screen(const Options& o, std::ostream& out, std::ostream& err) {
  const auto d = read_input(o);
  if (!require_valid(d, err)) return 1;
  const auto artifacts = read_artifacts(o);
  const auto strategy = strategy_flag(o);
  const auto* artifact = artifacts.find(Level::subject, strategy);
  if (!artifact) throw Error(ErrorKind::missing_data, "no subject-level artifact for strategy '" + o.strategy + "'");
  const auto rule = artifact->rule();

  GroupFilter filter{split_flag(o), std::nullopt};
  if (o.cohorts.size() == 1) filter.cohort = o.cohorts.front();
  const auto scores = aggregate_dataset(partition_and_group(d, filter), *strategy);

  std::string text;
  if (o.json) {
    auto list = nlohmann::json::array();
    for (const auto& s : scores) {
      list.push_back({{"subject_id", s.subject_id},
                      {"cohort", s.cohort},
                      {"label", s.label},
                      {"subject_score", s.score},
                      {"decision", rule.positive(s.score) ? "positive" : "negative"}});
    }
    text = nlohmann::json{{"strategy", o.strategy}, {"threshold", rule.threshold},
                          {"threshold_mode", std::string(to_string(rule.mode))}, {"subjects", list}}
               .dump(2) +
           "\n";
  } else {
    std::ostringstream os;
    os << "subject_id,cohort,label,subject_score,decision\n";
    for (const auto& s : scores) {
      char buf[32];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, s.score);
      os << s.subject_id << ',' << s.cohort << ',' << s.label << ',' << std::string(buf, ptr) << ','
         << (rule.positive(s.score) ? "positive" : "negative") << '\n';
    }
    text = os.str();
  }
  if (!o.out.empty()) write_file(o.out, text);
  if (o.json || o.out.empty()) out << text;
  return 0;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream&) {
  std::ifstream in(o.config);
  if (!in) throw Error(ErrorKind::missing_data, "cannot open config '" + o.config + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::parse, std::string("simulation config: ") + e.what());
  }
  auto cfg = sim_config_from_json(doc);
  if (o.seed) cfg.seed = *o.seed;
  const auto d = simulate_cohort(cfg);

  const bool as_json = o.format == "json" || (o.format.empty() && format_from_extension(o.out) == InputFormat::json);
  const std::string text = as_json ? to_json(d).dump(2) + "\n" : to_csv(d);
  if (!o.out.empty()) {
    write_file(o.out, text);
  } else {
    out << text;
  }
  return 0;
}

int cmd_roc(const Options& o, std::ostream& out, std::ostream& err) {
  const auto d = read_input(o);
  if (!require_valid(d, err)) return 1;
  const auto level = level_flag(o).value_or(Level::image);
  if (level == Level::subject && o.strategy.empty()) throw UsageError("--level subject requires --strategy");
  GroupFilter filter{split_flag(o), std::nullopt};
  if (o.cohorts.size() > 1) throw UsageError("roc takes at most one --cohort");
  if (o.cohorts.size() == 1) filter.cohort = o.cohorts.front();
  const auto roc = export_roc(d, level, level == Level::subject ? strategy_flag(o) : std::nullopt, filter);

  std::string svg_path = o.svg_out;
  if (svg_path.empty() && !o.out.empty()) svg_path = fs::path(o.out).replace_extension(".svg").string();
  if (!o.out.empty()) write_file(o.out, roc.csv);
  if (!svg_path.empty()) write_file(svg_path, roc.svg);

  if (o.json) {
    auto points = nlohmann::json::array();
    for (const auto& p : roc.curve.points) {
      points.push_back({{"threshold", std::isinf(p.threshold) ? nlohmann::json("inf") : nlohmann::json(p.threshold)},
                        {"fpr", p.fpr},
                        {"tpr", p.tpr}});
    }
    out << nlohmann::json{{"auc", roc.curve.auc}, {"points", points}}.dump(2) << '\n';
  } else if (o.out.empty()) {
    out << roc.csv;
  } else {
    char buf[64];
    std::snprintf(buf, sizeof buf, "AUC %.3f, %zu operating points\n", roc.curve.auc, roc.curve.points.size());
    out << buf;
  }
  return 0;
}

Service* g_service = nullptr;

extern "C" void on_signal(int) {
  if (g_service) g_service->stop();
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
  const auto colon = o.listen.rfind(':');
  if (colon == std::string::npos) throw UsageError("--listen expects HOST:PORT");
  const std::string host = o.listen.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(o.listen.substr(colon + 1));
  } catch (const std::exception&) {
    throw UsageError("--listen expects HOST:PORT");
  }

  ServiceConfig config;
  config.artifacts = read_artifacts(o);
  config.max_body_bytes = o.max_body_bytes;
  config.max_replicates = o.max_replicates;
  config.default_bootstrap.replicates = std::min(o.replicates, o.max_replicates);
  config.default_bootstrap.seed = o.seed.value_or(0);
  config.default_bootstrap.unit = *parse_unit(o.unit);

  Service service(std::move(config));
  const int bound = service.bind(host, port);
  if (bound < 0) {
    err << "cannot listen on " << o.listen << '\n';
    return 1;
  }
  out << "listening on " << host << ':' << bound << std::endl;
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  service.listen();
  g_service = nullptr;
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evaluation, calibration and screening for multi-image binary screening classifiers", "screeneval"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(library_version()));

  Options o;
  const std::vector<std::string> formats{"csv", "json"};
  const std::vector<std::string> levels{"image", "subject"};
  const std::vector<std::string> strategies{"max", "mean"};
  const std::vector<std::string> units{"photo", "subject"};
  const std::vector<std::string> modes{"ge", "gt"};
  const std::vector<std::string> splits{"train", "validation", "test", "all"};

  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("--input", o.input, "Dataset file (.csv or .json)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--format", o.format, "Override input format")->check(CLI::IsMember(formats));
  };
  auto add_artifacts = [&](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--artifacts", o.artifacts, "Calibration artifact files")
                    ->delimiter(',')
                    ->check(CLI::ExistingFile);
    if (required) opt->required();
    return opt;
  };
  auto add_scope = [&](CLI::App* cmd) {
    cmd->add_option("--cohort", o.cohorts, "Restrict to cohort (repeatable)");
    cmd->add_option("--split", o.split, "Split to evaluate (default test; 'all' for every split)")
        ->check(CLI::IsMember(splits));
  };

  auto* validate_cmd = app.add_subcommand("validate", "Check a dataset for schema and consistency violations");
  add_input(validate_cmd);
  validate_cmd->add_flag("--json", o.json, "Emit the validation report as JSON");

  auto* calibrate_cmd = app.add_subcommand("calibrate", "Pick F1-optimal thresholds on the validation split");
  add_input(calibrate_cmd);
  calibrate_cmd->add_option("--level", o.level, "image or subject (default: all three artifacts)")
      ->check(CLI::IsMember(levels));
  calibrate_cmd->add_option("--strategy", o.strategy, "Vote strategy for subject level")
      ->check(CLI::IsMember(strategies));
  calibrate_cmd->add_option("--threshold-mode", o.threshold_mode, "ge (default) or gt")->check(CLI::IsMember(modes));
  calibrate_cmd->add_option("--cohort", o.cohorts, "Calibrate on these cohorts only (repeatable)");
  calibrate_cmd->add_option("--out", o.out, "Artifact output path");
  calibrate_cmd->add_flag("--json", o.json, "Also print the artifact JSON to stdout");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Performance and confusion report with bootstrap CIs");
  add_input(evaluate_cmd);
  add_artifacts(evaluate_cmd, true);
  add_scope(evaluate_cmd);
  evaluate_cmd->add_option("--replicates", o.replicates, "Bootstrap replicates")->check(CLI::PositiveNumber);
  evaluate_cmd->add_option("--confidence", o.confidence, "Interval confidence level")->check(CLI::Range(0.0, 1.0));
  evaluate_cmd->add_option("--seed", o.seed, "Bootstrap seed (default 0)");
  evaluate_cmd->add_option("--unit", o.unit, "Resampling unit")->check(CLI::IsMember(units));
  evaluate_cmd->add_option("--threshold-mode", o.threshold_mode, "Override the artifacts' decision rule")
      ->check(CLI::IsMember(modes));
  evaluate_cmd->add_option("--out", o.out, "Report JSON path");
  evaluate_cmd->add_option("--confusion-out", o.confusion_out, "Confusion report JSON path");
  evaluate_cmd->add_flag("--json", o.json, "Print the report JSON instead of tables");

  auto* screen_cmd = app.add_subcommand("screen", "Subject-level decisions from image scores");
  add_input(screen_cmd);
  add_artifacts(screen_cmd, true);
  add_scope(screen_cmd);
  screen_cmd->add_option("--strategy", o.strategy, "Vote strategy")->required()->check(CLI::IsMember(strategies));
  screen_cmd->add_option("--threshold-mode", o.threshold_mode, "Override the artifact's decision rule")
      ->check(CLI::IsMember(modes));
  screen_cmd->add_option("--out", o.out, "Decision output path");
  screen_cmd->add_flag("--json", o.json, "Emit JSON instead of CSV");

  auto* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic scored cohort");
  simulate_cmd->add_option("--config", o.config, "Simulation config JSON")->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--seed", o.seed, "Overrides the config seed");
  simulate_cmd->add_option("--out", o.out, "Output dataset path");
  simulate_cmd->add_option("--format", o.format, "Output format (default from --out extension)")
      ->check(CLI::IsMember(formats));

  auto* roc_cmd = app.add_subcommand("roc", "Export ROC operating points (CSV) and plot (SVG)");
  add_input(roc_cmd);
  add_scope(roc_cmd);
  roc_cmd->add_option("--level", o.level, "image (default) or subject")->check(CLI::IsMember(levels));
  roc_cmd->add_option("--strategy", o.strategy, "Vote strategy for subject level")->check(CLI::IsMember(strategies));
  roc_cmd->add_option("--out", o.out, "CSV output path");
  roc_cmd->add_option("--svg", o.svg_out, "SVG output path (default: --out with .svg extension)");
  roc_cmd->add_flag("--json", o.json, "Print points and AUC as JSON");

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP screening service");
  serve_cmd->add_option("--listen", o.listen, "HOST:PORT")->envname("SCREENEVAL_LISTEN");
  add_artifacts(serve_cmd, true)->envname("SCREENEVAL_ARTIFACTS");
  serve_cmd->add_option("--max-body-bytes", o.max_body_bytes, "Request body cap")->envname("SCREENEVAL_MAX_BODY_BYTES");
  serve_cmd->add_option("--max-replicates", o.max_replicates, "Bootstrap replicate cap per request")
      ->envname("SCREENEVAL_MAX_REPLICATES");
  serve_cmd->add_option("--replicates", o.replicates, "Default bootstrap replicates")->check(CLI::PositiveNumber);
  serve_cmd->add_option("--seed", o.seed, "Default bootstrap seed");
  serve_cmd->add_option("--unit", o.unit, "Default resampling unit")->check(CLI::IsMember(units));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate_cmd) return cmd_validate(o, out, err);
    if (*calibrate_cmd) return cmd_calibrate(o, out, err);
    if (*evaluate_cmd) return cmd_evaluate(o, out, err);
    if (*screen_cmd) return cmd_screen(o, out, err);
    if (*simulate_cmd) return cmd_simulate(o, out, err);
    if (*roc_cmd) return cmd_roc(o, out, err);
    if (*serve_cmd) return cmd_serve(o, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace screeneval::cli
