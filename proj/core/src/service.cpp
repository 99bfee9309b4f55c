#include "screeneval/service.hpp"

#include <cmath>

#include <httplib.h>

#include "screeneval/dataset.hpp"
#include "screeneval/error.hpp"
#include "screeneval/report.hpp"
#include "screeneval/voting.hpp"

#ifndef SCREENEVAL_VERSION
#define SCREENEVAL_VERSION "0.0.0"
#endif

namespace screeneval {

std::string_view library_version() { return SCREENEVAL_VERSION; }

namespace {

HttpResponse json_response(int status, const nlohmann::json& doc) { return {status, doc.dump() + "\n"}; }

HttpResponse error_response(int status, std::string_view code, std::string_view message,
                            nlohmann::json extra = nullptr) {
  nlohmann::json doc{{"error", code}, {"message", message}};
  if (!extra.is_null()) doc["details"] = std::move(extra);
  return json_response(status, doc);
}

std::optional<nlohmann::json> parse_body(std::string_view body, HttpResponse& error) {
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    error = error_response(400, "malformed_json", e.what());
    return std::nullopt;
  }
}

std::vector<Selection> parse_selections(const nlohmann::json& list) {
  std::vector<Selection> out;
  for (const auto& item : list) {
    const auto text = item.get<std::string>();
    if (text == "image") {
      out.push_back({Level::image, std::nullopt});
    } else if (const auto strategy = parse_strategy(text)) {
      out.push_back({Level::subject, strategy});
    } else {
      throw Error(ErrorKind::invalid_argument, "unknown selection '" + text + "' (expected image, max or mean)");
    }
  }
  return out;
}

}  // namespace

struct Service::Impl {
  explicit Impl(ServiceConfig c) : config(std::move(c)) {}

  ServiceConfig config;
  httplib::Server server;
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  auto& server = impl_->server;
  server.set_payload_max_length(impl_->config.max_body_bytes);

  auto send = [](httplib::Response& res, const HttpResponse& out) {
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server.Get("/v1/health", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, handle_health());
  });
  server.Post("/v1/screen", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, handle_screen(req.body));
  });
  server.Post("/v1/evaluate", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, handle_evaluate(req.body));
  });
  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const std::string code = res.status == 404   ? "not_found"
                             : res.status == 413 ? "payload_too_large"
                                                 : "http_error";
    nlohmann::json doc{{"error", code}, {"message", "HTTP " + std::to_string(res.status) + " for " + req.path}};
    res.set_content(doc.dump() + "\n", "application/json");
  });
}

Service::~Service() { stop(); }

HttpResponse Service::handle_health() const {
  return json_response(200, {{"status", "ok"}, {"version", std::string(library_version())}});
}

HttpResponse Service::handle_screen(std::string_view body) const {
  HttpResponse error;
  const auto doc = parse_body(body, error);
  if (!doc) return error;
  if (!doc->is_object()) return error_response(400, "invalid_request", "expected a JSON object");

  const auto strategy_it = doc->find("strategy");
  if (strategy_it == doc->end() || !strategy_it->is_string()) {
    return error_response(400, "invalid_request", "missing 'strategy' (max or mean)");
  }
  const auto strategy = parse_strategy(strategy_it->get<std::string>());
  if (!strategy) return error_response(400, "unknown_strategy", "unknown strategy '" + strategy_it->get<std::string>() + "'");

  const auto scores_it = doc->find("scores");
  if (scores_it == doc->end() || !scores_it->is_array()) {
    return error_response(400, "invalid_request", "missing 'scores' array");
  }
  std::vector<double> scores;
  for (const auto& s : *scores_it) {
    if (!s.is_number()) return error_response(400, "invalid_score", "scores must be numbers");
    const double v = s.get<double>();
    if (!(v >= 0.0 && v <= 1.0)) return error_response(400, "invalid_score", "score out of [0,1]");
    scores.push_back(v);
  }
  if (scores.empty()) return error_response(400, "no_scores", "no scores for subject");

  const auto* artifact = impl_->config.artifacts.find(Level::subject, strategy);
  if (!artifact) {
    return error_response(400, "no_artifact",
                          "no subject-level calibration loaded for strategy '" + std::string(to_string(*strategy)) + "'");
  }

  const double subject_score = vote(scores, *strategy);
  const auto rule = artifact->rule();
  nlohmann::json out{{"subject_id", doc->value("subject_id", std::string{})},
                     {"subject_score", subject_score},
                     {"decision", rule.positive(subject_score) ? "positive" : "negative"},
                     {"threshold", rule.threshold},
                     {"threshold_mode", std::string(to_string(rule.mode))},
                     {"strategy", std::string(to_string(*strategy))}};
  return json_response(200, out);
}

HttpResponse Service::handle_evaluate(std::string_view body) const {
  const auto& config = impl_->config;
  if (body.size() > config.max_body_bytes) {
    return error_response(413, "payload_too_large", "request body exceeds the configured limit");
  }
  HttpResponse error;
  const auto doc = parse_body(body, error);
  if (!doc) return error;

  const nlohmann::json* records = nullptr;
  const nlohmann::json* options = nullptr;
  std::string provenance = "request";
  if (doc->is_array()) {
    records = &*doc;
  } else if (doc->is_object() && doc->contains("records")) {
    records = &(*doc)["records"];
    if (doc->contains("options")) options = &(*doc)["options"];
    if (doc->contains("provenance") && (*doc)["provenance"].is_string()) provenance = (*doc)["provenance"];
  } else {
    return error_response(400, "invalid_request", "expected a record array or an object with 'records'");
  }

  Dataset dataset;
  try {
    dataset = dataset_from_json(*records, provenance);
  } catch (const Error& e) {
    return error_response(400, "invalid_dataset", e.what());
  }
  const auto validation = validate(dataset);
  if (!validation.ok()) {
    return error_response(400, "invalid_dataset", "dataset failed validation", to_json(validation));
  }

  BootstrapConfig cfg = config.default_bootstrap;
  ReportOptions report_options;
  try {
    if (options) {
      if (!options->is_object()) throw Error(ErrorKind::invalid_argument, "'options' must be an object");
      cfg.replicates = options->value("replicates", cfg.replicates);
      cfg.confidence = options->value("confidence", cfg.confidence);
      cfg.seed = options->value("seed", cfg.seed);
      if (options->contains("unit")) {
        const auto unit = parse_unit((*options)["unit"].get<std::string>());
        if (!unit) throw Error(ErrorKind::invalid_argument, "unknown resampling unit");
        cfg.unit = *unit;
      }
      if (options->contains("split")) {
        const auto& split = (*options)["split"];
        if (split.is_null()) {
          report_options.split.reset();
        } else {
          const auto parsed = parse_split(split.get<std::string>());
          if (!parsed) throw Error(ErrorKind::invalid_argument, "unknown split");
          report_options.split = parsed;
        }
      }
      if (options->contains("selections")) report_options.selections = parse_selections((*options)["selections"]);
      if (options->contains("cohorts")) {
        report_options.cohorts = (*options)["cohorts"].get<std::vector<std::string>>();
      }
    }
    if (cfg.replicates > config.max_replicates) {
      throw Error(ErrorKind::invalid_argument,
                  "replicates exceeds the service cap of " + std::to_string(config.max_replicates));
    }
    cfg.validate();
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, "invalid_options", e.what());
  } catch (const Error& e) {
    return error_response(400, "invalid_options", e.what());
  }

  try {
    const auto report = build_performance_report(dataset, config.artifacts, cfg, report_options);
    return {200, serialize(report)};
  } catch (const Error& e) {
    return error_response(e.kind() == ErrorKind::missing_data ? 422 : 400, to_string(e.kind()), e.what());
  }
}

int Service::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool Service::listen() { return impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace screeneval
