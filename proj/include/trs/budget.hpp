#pragma once

#include <chrono>
#include <cstddef>
#include <optional>

#include "trs/error.hpp"

namespace trs {

/// Wall-clock deadline shared by long-running searches. A default-constructed
/// deadline never expires.
class Deadline {
 public:
  using clock = std::chrono::steady_clock;

  Deadline() = default;
  explicit Deadline(std::chrono::duration<double> limit)
      : at_(clock::now() + std::chrono::duration_cast<clock::duration>(limit)) {}

  static Deadline after_seconds(double seconds) {
    return Deadline(std::chrono::duration<double>(seconds));
  }

  bool expired() const { return at_ && clock::now() >= *at_; }
  bool bounded() const { return at_.has_value(); }

 private:
  std::optional<clock::time_point> at_;
};

/// Thrown when a node cap or deadline is hit. Callers that can degrade to an
/// inconclusive answer catch it; everyone else lets it propagate.
class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(const std::string& what)
      : Error("budget-exceeded", what) {}
};

inline void check_deadline(const Deadline& deadline) {
  if (deadline.expired()) throw BudgetExceeded("timeout reached");
}

}  // namespace trs
