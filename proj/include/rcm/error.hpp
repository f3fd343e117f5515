#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rcm {

enum class ErrorKind {
  schema,
  format,
  parameter,
  config,
  undefined_ratio,
  empty_scope,
  insufficient_data,
  generation,
  coverage,
  io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::schema: return "schema";
    case ErrorKind::format: return "format";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::config: return "config";
    case ErrorKind::undefined_ratio: return "undefined_ratio";
    case ErrorKind::empty_scope: return "empty_scope";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::generation: return "generation";
    case ErrorKind::coverage: return "coverage";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

/// Library-wide exception. `kind` lets callers (the CLI in particular) map
/// failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace rcm
