#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "algwb/algebra.hpp"
#include "algwb/relation.hpp"
#include "algwb/terms.hpp"

namespace algwb {

/// Interpretation of a finite set of constant symbols. Only the set of
/// interpreted elements matters to the constructions below, so distinct
/// values are stored once; `symbols` keeps the declared number of symbols.
struct OAssignment {
  std::vector<Elem> values;  // distinct, in first-occurrence order
  std::size_t symbols = 0;

  /// Symbol j < values.size() names values[j]; surplus symbols repeat values[0].
  Elem value(std::size_t symbol) const;
  bool represents(const Partition& alpha) const;

  static OAssignment from_elements(std::span<const Elem> interpretation);
  /// Least element of every alpha-class in increasing order, padded to
  /// `symbols` by the representative of the smallest class.
  static OAssignment canonical(const Partition& alpha, std::size_t symbols);
};

/// The alpha-class of a constant o under u + v = d(u, o, v), -u = d(o, u, o).
class ClassGroup {
 public:
  ClassGroup() = default;

  Elem zero() const { return zero_; }
  const std::vector<Elem>& carrier() const { return carrier_; }
  std::size_t size() const { return carrier_.size(); }
  bool contains(Elem u) const { return u < position_.size() && position_[u] >= 0; }
  std::size_t position(Elem u) const;
  Elem add(Elem u, Elem v) const;
  Elem negate(Elem u) const;
  Elem subtract(Elem u, Elem v) const { return add(u, negate(v)); }
  std::size_t exponent() const;

 private:
  friend ClassGroup class_group(const Algebra&, const Partition&, Elem, const Term&, const Budget&);
  Elem zero_ = 0;
  std::vector<Elem> carrier_;
  std::vector<std::int32_t> position_;  // per element of the algebra, -1 outside
  std::vector<Elem> add_;               // positions, row-major
  std::vector<Elem> negate_;
};

/// Builds the group and checks the abelian group axioms and
/// d(u, v, w) = u - v + w on the class. Throws HypothesisError on failure.
ClassGroup class_group(const Algebra& C, const Partition& alpha, Elem o, const Term& d, const Budget& budget = {});

/// d(...d(d(u_1, u_{e+1}, u_2), u_{e+1}, u_3)..., u_{e+1}, u_e), checked
/// against u_1 + ... + u_{e+1}. Needs exactly e + 1 elements of the class
/// and e a multiple of the exponent; throws std::invalid_argument otherwise
/// and HypothesisError if the two sides differ.
Elem sum_via_d(const Algebra& C, const ClassGroup& group, const Term& d, std::span<const Elem> us, std::size_t e);

/// Restriction of a unary O-term operation to a map between two classes.
struct UnaryAction {
  std::size_t source = 0, target = 0;  // group indices
  std::vector<Elem> map;               // image of each carrier element of the source, in carrier order
  /// Variable 0 is the argument; variable 1 + j is the constant values[j].
  Term term;
};

/// Groups on the classes of the constants together with every action
/// induced by a one-variable O-term.
struct GroupFamily {
  Algebra algebra;
  Partition alpha;
  OAssignment constants;
  Term d;
  std::vector<ClassGroup> groups;  // one per constants.values entry
  std::vector<UnaryAction> actions;

  std::optional<std::size_t> group_of_zero(Elem o) const;
  /// First group whose class contains u.
  std::optional<std::size_t> group_containing(Elem u) const;
  Elem apply(const UnaryAction& r, Elem u) const;
};

/// Closure of the identity and the constant maps inside the clone of unary
/// O-term operations on C, restricted to class-to-class maps and deduplicated.
std::vector<UnaryAction> unary_actions(const Algebra& C, const Partition& alpha, const OAssignment& O,
                                       const std::vector<ClassGroup>& groups, const Budget& budget = {});

/// Validates that alpha is an abelian congruence and d a difference term
/// for it, then builds every group and action and checks that each action is
/// additive. Throws HypothesisError on the first failure.
GroupFamily build_family(const Algebra& C, const Partition& alpha, const OAssignment& O, const Term& d,
                         const Budget& budget = {});

/// t(u_1..u_k) = r_1(u_1) + ... + r_k(u_k) + t(o_1..o_k) in the group of the
/// class of t(o_1..o_k), where r_i(x) = d(t(o_1..x..o_k), t(o_1..o_k), o).
struct DecompositionReport {
  bool ok = false;
  std::optional<std::size_t> target;  // group of t(o_1..o_k)
  Elem constant_part = 0;             // t(o_1..o_k)
  std::vector<std::optional<std::size_t>> actions;  // index into the family's actions per argument
  std::size_t tuples_checked = 0;
  std::string failure;
};

/// t has arity argument_groups.size() + constants.values.size(); the trailing
/// variables are bound to the constants.
DecompositionReport term_decomposition_check(const GroupFamily& F, const Term& t,
                                             std::span<const std::size_t> argument_groups,
                                             const Budget& budget = {});

/// Subset of each group's carrier, sorted.
struct SubFamily {
  std::vector<std::vector<Elem>> members;

  bool leq(const SubFamily& other) const;
  friend bool operator==(const SubFamily&, const SubFamily&) = default;
  friend auto operator<=>(const SubFamily&, const SubFamily&) = default;
};

SubFamily empty_family(const GroupFamily& F);
SubFamily full_family(const GroupFamily& F);
/// Intersections of the O-subuniverse generated by the constants with each class.
SubFamily least_subalgebra_family(const GroupFamily& F, const Budget& budget = {});
/// Intersections of a subuniverse with each class.
SubFamily family_of(const GroupFamily& F, const Relation& subuniverse);

/// Least family above seed and the least-subalgebra family that is closed
/// under the group operations and every action and agrees on coinciding classes.
SubFamily family_closure(const GroupFamily& F, const SubFamily& seed, const Budget& budget = {});

struct BijectionReport {
  std::size_t subalgebras = 0;
  std::size_t families = 0;
  bool images_closed = false;
  bool injective = false;
  bool surjective = false;
  bool preserves_order = false;
  bool reflects_order = false;
  bool ok() const { return images_closed && injective && surjective && preserves_order && reflects_order; }
};

/// Compares the subuniverses of C containing every constant with the closed
/// families via U -> family_of(U). Throws HypothesisError if the constants
/// miss an alpha-class.
BijectionReport subalgebra_submodule_bijection(const GroupFamily& F, const Budget& budget = {});

/// Coordinatewise algebra on the tuples of C <= prod factors; element i is C[i].
/// Throws HypothesisError if C is not closed.
Algebra product_subalgebra(std::span<const Algebra> factors, const Relation& C, const Budget& budget = {});

struct RegroupReport {
  bool classes_match = false;  // class of o in C = product of the classes of o_i
  bool bijective = false;
  bool additive = false;
  bool equivariant = false;
  std::size_t actions_checked = 0;
  std::string failure;
  bool ok() const { return classes_match && bijective && additive && equivariant; }
};

/// C <= prod factors with alpha = prod alphas, constants given as indices of
/// tuples of C, d a difference term for every factor. Throws HypothesisError
/// when C is not alpha-saturated or some alpha_i is not abelian.
RegroupReport regroup_iso(std::span<const Algebra> factors, std::span<const Partition> alphas, const Relation& C,
                          std::span<const std::size_t> constants, const Term& d, const Budget& budget = {});

}  // namespace algwb
