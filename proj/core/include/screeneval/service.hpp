#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "screeneval/bootstrap.hpp"
#include "screeneval/calibration.hpp"

namespace screeneval {

std::string_view library_version();

struct ServiceConfig {
  ArtifactSet artifacts;
  std::size_t max_body_bytes = 32u << 20;
  std::size_t max_replicates = 10000;
  /// Bootstrap settings used when an evaluate request does not override them.
  BootstrapConfig default_bootstrap;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Stateless HTTP front end. Endpoints:
///   GET  /v1/health    -> {"status":"ok","version":...}
///   POST /v1/screen    -> vote + threshold for one subject
///   POST /v1/evaluate  -> performance report for a posted dataset
/// The handle_* members are the exact request handlers and can be called
/// in-process; the server only adds transport. All state is fixed at
/// construction. Error bodies are {"error": <code>, "message": <text>}.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  HttpResponse handle_health() const;
  HttpResponse handle_screen(std::string_view body) const;
  HttpResponse handle_evaluate(std::string_view body) const;

  /// Binds the listening socket; port 0 picks a free port. Returns the bound
  /// port, or -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(); requires a prior successful bind().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace screeneval
