#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "algwb/error.hpp"

namespace algwb {

/// Finite set of fixed-arity tuples, kept sorted lexicographically and
/// duplicate free. Used both for relations on an algebra and for
/// subuniverses of a power.
class Relation {
 public:
  Relation() = default;
  explicit Relation(std::size_t arity);
  /// Flat row-major tuple data; sorted and deduplicated here.
  Relation(std::size_t arity, std::vector<Elem> flat);
  static Relation from_tuples(std::size_t arity, const std::vector<std::vector<Elem>>& tuples);
  /// All of [0,n)^arity.
  static Relation full(std::size_t n, std::size_t arity);
  /// {(a,a) : a < n}.
  static Relation equality(std::size_t n);

  std::size_t arity() const { return arity_; }
  std::size_t size() const { return arity_ == 0 ? 0 : data_.size() / arity_; }
  bool empty() const { return size() == 0; }
  std::span<const Elem> operator[](std::size_t i) const {
    return {data_.data() + i * arity_, arity_};
  }
  std::vector<Elem> tuple(std::size_t i) const;
  std::span<const Elem> flat() const { return data_; }

  bool contains(std::span<const Elem> t) const { return index_of(t).has_value(); }
  std::optional<std::size_t> index_of(std::span<const Elem> t) const;

  /// Tuples restricted to the listed coordinates (in the listed order).
  Relation project(std::span<const std::size_t> coords) const;
  /// Values occurring in coordinate i, sorted.
  std::vector<Elem> coordinate_values(std::size_t i) const;
  /// New tuple position j takes old coordinate perm[j].
  Relation permute(std::span<const std::size_t> perm) const;
  Relation intersect(const Relation& other) const;
  Relation product(const Relation& other) const;
  bool subset_of(const Relation& other) const;
  Relation unite(const Relation& other) const;

  std::string to_string() const;

  friend bool operator==(const Relation& a, const Relation& b) {
    return a.arity_ == b.arity_ && a.data_ == b.data_;
  }
  friend bool operator<(const Relation& a, const Relation& b);

 private:
  void normalize();
  std::size_t arity_ = 0;
  std::vector<Elem> data_;
};

}  // namespace algwb
