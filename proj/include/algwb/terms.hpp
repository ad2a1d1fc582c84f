#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "algwb/algebra.hpp"
#include "algwb/closure.hpp"
#include "algwb/commutator.hpp"

namespace algwb {

/// A term as a DAG of basic-operation applications, children before parents,
/// root last.
struct Term {
  struct Node {
    static constexpr std::int32_t kVariable = -1;
    std::int32_t op = kVariable;
    std::size_t variable = 0;         // when op == kVariable
    std::vector<std::size_t> args;    // node indices
  };

  std::size_t arity = 0;
  std::vector<Node> nodes;

  static Term variable(std::size_t arity, std::size_t i);
  /// Term for tuple `index` of a closure recorded with provenance; generator g becomes variable g.
  static Term from_provenance(const ClosureResult& closure, std::size_t index, std::size_t arity);

  std::size_t root() const { return nodes.size() - 1; }
  /// Value at one assignment; scratch is resized as needed.
  Elem evaluate(const Algebra& A, std::span<const Elem> vars, std::vector<Elem>& scratch) const;
  /// Full table on A, first variable most significant.
  std::vector<Elem> table(const Algebra& A, const Budget& budget = {}) const;
  std::string to_string(const Algebra& A) const;
};

enum class TermKind { Maltsev, NearUnanimity, Parallelogram, Difference };

struct TermWitness {
  TermKind kind = TermKind::Maltsev;
  std::size_t m = 0, n = 0;  // parallelogram split
  std::size_t k = 0;         // m + n, or the near-unanimity arity
  std::size_t arity = 0;
  std::size_t universe = 0;  // size of the algebra the table lives on
  Term derivation;
  std::vector<Elem> table;

  std::string describe() const;
};

/// One defining identity: the term applied to variables args[0..] equals variable result.
struct IdentityRow {
  std::vector<std::uint8_t> args;
  std::uint8_t result = 0;
};

struct IdentitySystem {
  std::size_t variables = 0;
  std::vector<IdentityRow> rows;
};

IdentitySystem maltsev_identities();
IdentitySystem near_unanimity_identities(std::size_t k);
/// Rows of the (m,n)-parallelogram matrix over x=0, y=1, z=2.
IdentitySystem parallelogram_identities(std::size_t m, std::size_t n);
IdentitySystem identities_for(const TermWitness& w);

/// Some term whose operation on A satisfies every row, or absent.
/// Decided by membership of the target tuple in a generated subpower.
std::optional<Term> find_term(const Algebra& A, const IdentitySystem& system, std::size_t arity,
                              const Budget& budget = {});

std::optional<TermWitness> has_parallelogram_term(const Algebra& A, std::size_t m, std::size_t n,
                                                  const Budget& budget = {});
std::optional<TermWitness> has_maltsev_term(const Algebra& A, const Budget& budget = {});
std::optional<TermWitness> has_nu_term(const Algebra& A, std::size_t k, const Budget& budget = {});

/// Table satisfies its identities on every substitution.
bool satisfies_identities(const TermWitness& w);
/// Derivation reproduces the table on A and the identities hold.
bool verify_witness(const Algebra& A, const TermWitness& w);

/// A verified Maltsev, near-unanimity or parallelogram witness certifies a
/// congruence modular variety. Throws HypothesisError otherwise.
CmGuard cm_guard(const TermWitness& w);

struct ParallelogramProfile {
  std::size_t k_max = 0;
  /// exists[k - 2][m - 1] for the (m, k - m) split.
  std::vector<std::vector<bool>> exists;
  /// Smallest k with a witness.
  std::optional<std::size_t> least_k() const;
  bool at(std::size_t k) const { return exists.at(k - 2).front(); }
};

/// Throws std::logic_error if the splits of some k disagree.
ParallelogramProfile parallelogram_profile(const Algebra& A, std::size_t k_max, const Budget& budget = {});

/// Smallest-k parallelogram witness up to k_max, preferring the Maltsev-equivalent k = 2.
std::optional<TermWitness> least_parallelogram_term(const Algebra& A, std::size_t k_max, const Budget& budget = {});

struct DifferenceTarget {
  Algebra algebra;
  Partition alpha;  // abelian congruence of algebra
};

struct DifferenceTerm {
  TermWitness term;
  std::vector<DifferenceTarget> verified_on;
};

/// Failure detail of checking a ternary table against one target.
struct DifferenceCheck {
  bool ok = true;
  std::string failure;
};

/// d(x,x,y) = y on C, d(y,x,x) = y for x alpha y, and d commutes with every
/// basic operation on alpha-related triples.
DifferenceCheck check_difference_term(const Term& d, const DifferenceTarget& target, const Budget& budget = {});

/// Maltsev witness if there is one, otherwise the first member of the ternary
/// clone that passes every target. Throws std::invalid_argument if a target
/// congruence is not abelian or the signatures differ.
std::optional<DifferenceTerm> find_difference_term(const Algebra& A, const std::vector<DifferenceTarget>& targets,
                                                   const Budget& budget = {});

}  // namespace algwb
