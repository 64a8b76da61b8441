#pragma once

#include <stdexcept>
#include <string>

namespace tsad {

// Values double as the CLI's process exit codes.
enum class ErrorKind : int {
  usage = 1,
  data = 2,
  invariant = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed input, failed I/O, or a schema violation in a file.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Bad configuration or argument combination.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

/// A value-type invariant would be broken.
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what)
      : Error(ErrorKind::invariant, what) {}
};

}  // namespace tsad
