#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "algwb/algebra.hpp"
#include "algwb/relation.hpp"

namespace algwb {

/// Hash set of fixed-width tuples with stable insertion indices.
class TupleTable {
 public:
  explicit TupleTable(std::size_t width);

  std::size_t width() const { return width_; }
  std::size_t size() const { return count_; }
  std::span<const Elem> operator[](std::size_t i) const { return {data_.data() + i * width_, width_}; }

  /// Index of t, and whether it was newly inserted.
  std::pair<std::size_t, bool> insert(std::span<const Elem> t);
  std::optional<std::size_t> find(std::span<const Elem> t) const;

  Relation to_relation() const;

 private:
  std::uint64_t hash(std::span<const Elem> t) const;
  bool equal_at(std::size_t i, std::span<const Elem> t) const;
  void grow();

  std::size_t width_;
  std::size_t count_ = 0;
  std::vector<Elem> data_;
  std::vector<std::uint32_t> slots_;  // 0 = empty, otherwise index + 1
};

/// How a tuple entered a closure: generator g, or op applied to earlier tuples.
struct Provenance {
  static constexpr std::int32_t kGenerator = -1;
  std::int32_t op = kGenerator;
  std::size_t generator = 0;             // valid when op == kGenerator
  std::vector<std::uint32_t> arguments;  // tuple indices, valid otherwise
};

struct ClosureOptions {
  Budget budget;
  /// Stop as soon as this tuple is produced.
  std::optional<std::vector<Elem>> target;
  bool record_provenance = false;
  /// The first `closed_prefix` generators already form a subuniverse,
  /// so combinations among them are skipped.
  std::size_t closed_prefix = 0;
};

struct ClosureResult {
  TupleTable tuples;
  std::vector<Provenance> provenance;  // parallel to tuples when recorded
  std::optional<std::size_t> target_index;
};

/// Subuniverse of A^width generated by the given tuples (flat, row-major).
ClosureResult close_subpower(const Algebra& A, std::size_t width, std::span<const Elem> generators,
                             const ClosureOptions& options);

Relation generate_subuniverse(const Algebra& A, const Relation& generators, const Budget& budget = {});
/// Subuniverse of A^width generated by the tuples of `generators`, which may be empty.
Relation generate_subuniverse(const Algebra& A, std::size_t width, std::span<const Elem> generators,
                              const Budget& budget = {});
bool is_subuniverse(const Algebra& A, const Relation& R, const Budget& budget = {});

/// Every subuniverse U of A^width with lower <= U <= upper, where lower and
/// upper are subuniverses (lower may be empty). Sorted by size, then tuples.
std::vector<Relation> subuniverses_between(const Algebra& A, const Relation& lower, const Relation& upper,
                                           const Budget& budget = {});

/// All nonempty subuniverses of A as unary relations, sorted by size then elements.
std::vector<Relation> subalgebras(const Algebra& A, const Budget& budget = {});

/// Elements chosen greedily so that each is outside the subuniverse
/// generated by the previous ones and the constants. They generate A.
std::vector<Elem> generating_sequence(const Algebra& A);

}  // namespace algwb
