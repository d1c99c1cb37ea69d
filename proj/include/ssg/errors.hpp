#pragma once

#include <stdexcept>
#include <string>

namespace ssg {

// Invalid input for a mathematical construction (bad parameters, failed
// validation, out-of-range epsilon). Maps to CLI exit code 1.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A named definitional check failed while constructing a family.
class CheckFailed : public DomainError {
 public:
  CheckFailed(std::string check, const std::string& message)
      : DomainError(check + ": " + message), check_(std::move(check)) {}
  const std::string& check() const { return check_; }

 private:
  std::string check_;
};

// A configurable search cap was hit. The result is unknown, never wrong.
// Maps to CLI exit code 3.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable file, malformed JSON or table, or a config that does not fit the
// schema. Maps to CLI exit code 2.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A query needs a sphere table beyond the enumerated radius.
class TableExhausted : public DomainError {
 public:
  using DomainError::DomainError;
};

// The available finite data does not decide the answer (for instance I_K
// has not stabilized on the ball in question).
class Undetermined : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace ssg
