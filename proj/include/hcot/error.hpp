#pragma once

#include <stdexcept>
#include <string>

namespace hcot {

enum class ErrorKind {
  InvalidArgument,
  ShapeMismatch,
  OutOfRange,
  Singular,
  Geometry,
  TruncatedFile,
  MalformedJson,
  Io,
  State,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` is what callers branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace hcot
