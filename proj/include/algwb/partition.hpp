#pragma once

#include <compare>
#include <map>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "algwb/error.hpp"

namespace algwb {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n);
  std::size_t find(std::size_t x);
  // Returns false when x and y were already together.
  bool unite(std::size_t x, std::size_t y);
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_;
};

/// Equivalence relation on [0,n) stored canonically: label(x) is the least
/// element of the block of x.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::size_t n);  // identity relation

  static Partition identity(std::size_t n) { return Partition(n); }
  static Partition full(std::size_t n);
  /// Any labeling; elements with equal labels share a block.
  template <class Label>
  static Partition from_labels(std::span<const Label> labels);
  static Partition from_blocks(std::size_t n, const std::vector<std::vector<Elem>>& blocks);
  static Partition from_union_find(UnionFind& uf);

  std::size_t size() const { return rep_.size(); }
  Elem rep(std::size_t x) const { return rep_[x]; }
  bool related(std::size_t x, std::size_t y) const { return rep_[x] == rep_[y]; }
  std::span<const Elem> labels() const { return rep_; }

  std::size_t num_blocks() const;
  bool is_identity() const;
  bool is_full() const;
  /// Blocks sorted by least element, each block sorted.
  std::vector<std::vector<Elem>> blocks() const;
  std::vector<Elem> block_of(std::size_t x) const;
  /// Index of the block of x in the order of blocks().
  std::vector<std::size_t> block_indices() const;

  bool leq(const Partition& other) const;
  Partition join(const Partition& other) const;
  Partition meet(const Partition& other) const;

  std::string to_string() const;

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition&, const Partition&) = default;

 private:
  std::vector<Elem> rep_;
};

template <class Label>
Partition Partition::from_labels(std::span<const Label> labels) {
  Partition p;
  p.rep_.resize(labels.size());
  std::map<Label, Elem> first;
  for (std::size_t x = 0; x < labels.size(); ++x) {
    p.rep_[x] = first.emplace(labels[x], static_cast<Elem>(x)).first->second;
  }
  return p;
}

}  // namespace algwb
