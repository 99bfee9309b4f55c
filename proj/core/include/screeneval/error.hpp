#pragma once

#include <stdexcept>
#include <string>

namespace screeneval {

enum class ErrorKind {
  parse,
  invalid_argument,
  missing_data,
  undefined_metric,
  oracle_inapplicable,
};

// All library failures surface as this exception. Data-quality problems that
// are not failures (see validate()) are returned as values instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse_error";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::missing_data: return "missing_data";
    case ErrorKind::undefined_metric: return "undefined_metric";
    case ErrorKind::oracle_inapplicable: return "oracle_inapplicable";
  }
  return "error";
}

}  // namespace screeneval
