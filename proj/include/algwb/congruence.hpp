#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "algwb/algebra.hpp"
#include "algwb/partition.hpp"

namespace algwb {

bool is_congruence(const Algebra& A, const Partition& theta);

/// Least congruence containing the given pairs.
Partition congruence_generated(const Algebra& A, std::span<const std::pair<Elem, Elem>> pairs);
/// Least congruence containing theta (an equivalence) and closed under A.
Partition congruence_generated(const Algebra& A, const Partition& theta);
Partition principal_congruence(const Algebra& A, Elem a, Elem b);

/// Con(A) with meet/join tables. Index 0 is the identity relation, the last
/// index is the full relation; otherwise ordered by decreasing block count,
/// then by canonical labels.
class CongruenceLattice {
 public:
  static CongruenceLattice compute(const Algebra& A, const Budget& budget = {});

  std::size_t size() const { return elems_.size(); }
  const Partition& operator[](std::size_t i) const { return elems_[i]; }
  const std::vector<Partition>& elements() const { return elems_; }
  std::size_t bottom() const { return 0; }
  std::size_t top() const { return elems_.size() - 1; }

  std::optional<std::size_t> find(const Partition& p) const;
  /// Like find, but throws std::invalid_argument when p is not a congruence.
  std::size_t index(const Partition& p) const;

  bool leq(std::size_t a, std::size_t b) const { return leq_[a * size() + b]; }
  std::size_t meet(std::size_t a, std::size_t b) const { return meet_[a * size() + b]; }
  std::size_t join(std::size_t a, std::size_t b) const { return join_[a * size() + b]; }
  std::vector<std::size_t> upper_covers(std::size_t a) const;
  std::vector<std::size_t> lower_covers(std::size_t a) const;
  bool covers(std::size_t lower, std::size_t upper) const;
  /// Indices of the principal congruences Cg(a,b), a != b.
  const std::vector<std::size_t>& principal() const { return principal_; }
  /// Elements with exactly one upper cover.
  std::vector<std::size_t> meet_irreducibles() const;
  /// SI test: a unique atom. Returns it.
  std::optional<std::size_t> monolith() const;

 private:
  std::vector<Partition> elems_;
  std::map<std::vector<Elem>, std::size_t> index_;
  std::vector<char> leq_;
  std::vector<std::size_t> meet_, join_;
  std::vector<std::size_t> principal_;
};

/// Saturation test for relations: R[theta at coordinate i] == R.
bool saturates(const Relation& R, std::size_t coord, const Partition& theta);

/// Relational product a o b.
std::vector<std::pair<Elem, Elem>> compose(const Partition& a, const Partition& b);
bool permutes(const Partition& a, const Partition& b);

}  // namespace algwb
