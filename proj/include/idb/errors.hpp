#pragma once

#include <stdexcept>
#include <string>

namespace idb {

// Process exit status associated with each failure category.
enum class ErrorKind : int {
  usage = 1,
  data = 2,
  inconsistency = 3,
  coverage = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

// Bad arguments, bad config, precondition violations on declared assumptions.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

// Surveillance input violates a data invariant.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

// The data refute the maintained assumptions (crossed bounds).
class InconsistencyError : public Error {
 public:
  explicit InconsistencyError(const std::string& what)
      : Error(ErrorKind::inconsistency, what) {}
};

}  // namespace idb
