#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vibronic {

/// Raised when an argument violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a sum-over-states enumeration would exceed the configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::uint64_t count, bool saturated, std::uint64_t budget);

  /// Number of configurations requested; meaningless when saturated() is set.
  std::uint64_t count() const noexcept { return count_; }
  /// True when (1+K)^N does not fit in 64 bits.
  bool saturated() const noexcept { return saturated_; }
  std::uint64_t budget() const noexcept { return budget_; }

 private:
  std::uint64_t count_;
  bool saturated_;
  std::uint64_t budget_;
};

/// Malformed molecule or spectrum file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Energy grid violates its invariants.
class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace vibronic
