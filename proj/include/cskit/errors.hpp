#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cskit {

// Precondition violations on operation arguments.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A matrix that cannot be certified (e.g. a zero column where normalization
// is required).
class DegenerateMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An exhaustive search whose enumeration size exceeds the configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, std::uint64_t required,
                 std::uint64_t budget)
      : std::runtime_error(what + ": requires " + std::to_string(required) +
                           " evaluations, budget is " +
                           std::to_string(budget)),
        required_(required),
        budget_(budget) {}

  std::uint64_t required() const noexcept { return required_; }
  std::uint64_t budget() const noexcept { return budget_; }

 private:
  std::uint64_t required_;
  std::uint64_t budget_;
};

// A metric whose defining expression has a zero denominator.
class UndefinedMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Configuration document errors. `path()` names the offending JSON path.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace cskit
