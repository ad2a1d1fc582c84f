#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "algwb/algebra.hpp"

namespace algwb {

struct HomSearchOptions {
  /// Optional per-element candidate lists (sorted). Empty list vector = no restriction.
  std::vector<std::vector<Elem>> allowed;
  /// Preassigned images.
  std::vector<std::optional<Elem>> fixed;
  bool injective = false;
  std::size_t limit = std::numeric_limits<std::size_t>::max();
  Budget budget;
};

/// All homomorphisms src -> tgt satisfying the options, in lexicographic
/// order of image vectors. Throws BudgetExceeded when the search tree
/// outgrows the budget.
std::vector<HomMap> homomorphisms(const Algebra& src, const Algebra& tgt, const HomSearchOptions& options = {});
std::optional<HomMap> find_homomorphism(const Algebra& src, const Algebra& tgt, HomSearchOptions options = {});

std::vector<HomMap> automorphisms(const Algebra& A, const Budget& budget = {});
std::optional<HomMap> isomorphism(const Algebra& A, const Algebra& B, const Budget& budget = {});

}  // namespace algwb
