#pragma once

#include <stdexcept>
#include <string>

namespace geoflow {

enum class ErrorKind {
  invalid_argument,
  invalid_geometry,
  io,
  config,
  resource_limit,
  no_variance,
  empty_table,
  data,
};

const char* to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind decides
/// how front ends report it (the CLI maps kinds to exit codes).
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

}  // namespace geoflow
