#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "algwb/algebra.hpp"
#include "algwb/congruence.hpp"

namespace algwb {

struct TermWitness;

/// Evidence that the algebra generates a congruence modular variety. The
/// centralizer and everything built on it require one.
class CmGuard {
 public:
  /// Explicit override for callers who know modularity by other means.
  static CmGuard assume(std::string reason) { return CmGuard("assumed: " + std::move(reason)); }
  const std::string& evidence() const { return evidence_; }

 private:
  explicit CmGuard(std::string e) : evidence_(std::move(e)) {}
  std::string evidence_;
  friend CmGuard cm_guard(const TermWitness& w);
};

/// [alpha, beta] via the congruence Delta on A(beta) generated by the
/// alpha-diagonal pairs.
Partition commutator(const Algebra& A, const Partition& alpha, const Partition& beta, const Budget& budget = {});

/// Con(A) together with the commutator of every pair of congruences.
class CommutatorTable {
 public:
  static CommutatorTable compute(const Algebra& A, const Budget& budget = {});

  const Algebra& algebra() const { return algebra_; }
  const CongruenceLattice& lattice() const { return lattice_; }
  std::size_t size() const { return lattice_.size(); }
  const Partition& operator[](std::size_t i) const { return lattice_[i]; }
  std::size_t index(const Partition& p) const { return lattice_.index(p); }
  std::size_t top() const { return lattice_.top(); }
  std::size_t bottom() const { return lattice_.bottom(); }

  /// Index of [a, b].
  std::size_t comm(std::size_t a, std::size_t b) const { return table_[a * size() + b]; }
  /// (beta : alpha), the largest gamma with [alpha, gamma] <= beta.
  std::size_t centralizer(std::size_t beta, std::size_t alpha, const CmGuard& guard) const;
  /// (0 : 1).
  std::size_t center(const CmGuard& guard) const { return centralizer(bottom(), top(), guard); }

 private:
  Algebra algebra_;
  CongruenceLattice lattice_;
  std::vector<std::size_t> table_;
};

Partition centralizer(const Algebra& A, const Partition& beta, const Partition& alpha, const CmGuard& guard);
Partition center(const Algebra& A, const CmGuard& guard);

enum class Identity { C1, C3, C8 };
const char* identity_name(Identity id);

struct IdentityCheck {
  bool holds = true;
  /// First failing (x, y) in lattice index order; y unused for C8.
  std::optional<std::pair<std::size_t, std::size_t>> witness;
};

IdentityCheck check_identity(const CommutatorTable& T, Identity id);

/// [alpha, alpha] <= beta; throws std::invalid_argument unless beta <= alpha.
bool is_abelian_interval(const CommutatorTable& T, std::size_t beta, std::size_t alpha);
/// Every prime quotient gamma < eta inside [beta, alpha] has [eta, eta] not below gamma.
bool is_neutral_interval(const CommutatorTable& T, std::size_t beta, std::size_t alpha);

struct Series {
  std::vector<Partition> derived;        // 1, [1,1], [[1,1],[1,1]], ...
  std::vector<Partition> lower_central;  // 1, [1,1], [1,[1,1]], ...
  std::vector<Partition> upper_central;  // 0, center, ...
  bool solvable = false;
  bool nilpotent = false;
};

Series series(const CommutatorTable& T, const CmGuard& guard, const Budget& budget = {});

/// (delta, theta, nu): delta has the unique upper cover theta, nu = (delta : theta),
/// and theta/delta is abelian. Stored as lattice indices.
struct RelevantTriple {
  std::size_t delta = 0, theta = 0, nu = 0;
  friend bool operator==(const RelevantTriple&, const RelevantTriple&) = default;
};

std::vector<RelevantTriple> relevant_triples(const CommutatorTable& T, const CmGuard& guard);

struct ResidualSmallness {
  bool c1_in_all_subalgebras = true;  // condition (c)
  bool nu_condition = true;           // [nu, nu] <= delta for every relevant triple of every subalgebra
  bool agree() const { return c1_in_all_subalgebras == nu_condition; }
  std::vector<std::string> failures;
};

ResidualSmallness residual_smallness_test(const Algebra& A, const CmGuard& guard, const Budget& budget = {});

}  // namespace algwb
