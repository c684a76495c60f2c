#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mcs {

// Bad argument or constraint violation on an input value.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// More offloading vehicles than bandwidth units.
class InfeasibleBandwidthError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Objective evaluated on an assigned link with zero rate.
class DegenerateObjectiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A matching that does not agree with the graph or instance it refers to.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Bid addressed to a cluster that is not part of the auction round.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Auction exceeded twice its theoretical round ceiling.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exhaustive solver refused an instance that is too large to enumerate.
class SizeGuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Metric requested on input where it has no defined value.
class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Config file problem. Parse errors carry the offending line (1-based, 0 when
// the problem is not tied to a single line); validation failures carry every
// violated constraint.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line),
        issues_{what} {}

  explicit ConfigError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), line_(0), issues_(std::move(issues)) {}

  int line() const noexcept { return line_; }
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "invalid configuration:";
    for (const auto& issue : issues) out += "\n  " + issue;
    return out;
  }

  int line_;
  std::vector<std::string> issues_;
};

}  // namespace mcs
