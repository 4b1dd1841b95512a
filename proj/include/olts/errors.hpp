#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace olts {

// A sampled episode contradicted the model assumptions (e.g. the
// cumulative-reward bound). Raised at sampling time, not statically.
class ModelViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An enumeration would exceed the configured budget. Carries the count (or
// its order of magnitude when it does not fit in 64 bits).
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& message, double log10_count,
                 std::uint64_t exact_count)
      : std::runtime_error(message),
        log10_count(log10_count),
        exact_count(exact_count) {}

  double log10_count = 0.0;
  std::uint64_t exact_count = 0;  // 0 when only log10_count is meaningful
};

// Malformed input file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace olts
