#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "algwb/error.hpp"
#include "algwb/partition.hpp"
#include "algwb/relation.hpp"

namespace algwb {

/// Basic operation given by its full table. Arguments index the table
/// row-major with the leftmost argument most significant.
struct Operation {
  std::string name;
  std::size_t arity = 0;
  std::vector<Elem> table;

  friend bool operator==(const Operation&, const Operation&) = default;
};

std::size_t checked_power(std::size_t base, std::size_t exp);

/// Immutable finite algebra on [0,size). Copies share storage.
class Algebra {
 public:
  Algebra();  // the one-element algebra with no operations
  Algebra(std::string name, std::size_t size, std::vector<Operation> ops);

  const std::string& name() const { return d_->name; }
  std::size_t size() const { return d_->size; }
  std::size_t num_ops() const { return d_->ops.size(); }
  const Operation& op(std::size_t i) const { return d_->ops[i]; }
  std::span<const Operation> ops() const { return d_->ops; }
  std::optional<std::size_t> find_op(std::string_view name) const;

  Elem apply(std::size_t op, std::span<const Elem> args) const;
  Elem apply(std::size_t op, std::initializer_list<Elem> args) const {
    return apply(op, std::span<const Elem>(args.begin(), args.size()));
  }

  bool same_signature(const Algebra& other) const;
  Algebra renamed(std::string name) const;

  friend bool operator==(const Algebra& a, const Algebra& b);

 private:
  struct Data {
    std::string name;
    std::size_t size;
    std::vector<Operation> ops;
  };
  std::shared_ptr<const Data> d_;
};

bool is_homomorphism(const Algebra& src, const Algebra& tgt, std::span<const Elem> image);

/// Structure-preserving map, image[x] for each source element x.
struct HomMap {
  Algebra source;
  Algebra target;
  std::vector<Elem> image;

  bool verify() const { return is_homomorphism(source, target, image); }
  Partition kernel() const { return Partition::from_labels(std::span<const Elem>(image)); }
  bool injective() const { return kernel().is_identity(); }
  HomMap compose_after(const HomMap& first) const;  // this o first
};

struct Product {
  Algebra algebra;
  std::vector<HomMap> projections;
};

/// Factors must share a signature. Elements are mixed-radix encoded with
/// the first factor most significant.
Product direct_product(std::span<const Algebra> factors, const Budget& budget = {});

struct Quotient {
  Algebra algebra;
  HomMap natural;  // x -> index of its block (blocks ordered by least element)
};

/// Throws std::invalid_argument when theta is not a congruence.
Quotient quotient(const Algebra& A, const Partition& theta);

/// Subalgebra of A^power whose universe is the given subuniverse. Its
/// elements are the indices of the tuples of the relation.
struct Subpower {
  Algebra algebra;
  Relation universe;

  std::size_t power() const { return universe.arity(); }
  std::size_t local(std::span<const Elem> t) const;
  std::size_t local(Elem a) const { return local(std::span<const Elem>(&a, 1)); }
  std::span<const Elem> global(std::size_t i) const { return universe[i]; }
};

/// Throws std::invalid_argument if the relation is not a subuniverse.
Subpower make_subpower(const Algebra& A, const Relation& universe, std::string name = "",
                       const Budget& budget = {});
Subpower make_subalgebra(const Algebra& A, std::span<const Elem> elements, std::string name = "");

/// Partition on A lifted to a partition on a subpower via a coordinate map.
Partition pull_back(const Partition& theta, std::span<const Elem> map);

}  // namespace algwb
