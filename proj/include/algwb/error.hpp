#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace algwb {

/// Universe elements are small non-negative integers.
using Elem = std::uint16_t;

inline constexpr std::size_t kMaxUniverse = 65535;

/// Malformed input file or table.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An enumeration exceeded its budget. Never swallowed by the library.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, std::size_t limit)
      : std::runtime_error(what + " exceeded budget of " + std::to_string(limit)),
        limit_(limit) {}
  std::size_t limit() const { return limit_; }

 private:
  std::size_t limit_;
};

/// A structural precondition of an operation does not hold.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cap on the number of objects (tuples, search nodes, ...) one enumeration may create.
struct Budget {
  std::size_t limit = 4'000'000;

  void charge(std::size_t used, const char* what) const {
    if (used > limit) throw BudgetExceeded(what, limit);
  }
};

}  // namespace algwb
