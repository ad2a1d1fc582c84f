#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "algwb/algebra.hpp"
#include "algwb/relations.hpp"
#include "algwb/splitcheck.hpp"
#include "algwb/terms.hpp"

namespace algwb {

/// A factor B_i <= A^{p_i} with its abelian congruence (on local indices).
struct StarFactor {
  Subpower algebra;
  Partition alpha;

  friend bool operator==(const StarFactor& a, const StarFactor& b) {
    return a.algebra.universe == b.algebra.universe && a.alpha == b.alpha;
  }
};

/// B <= prod B_i, kept both as a relation of A (blocks of p_i coordinates,
/// factor order) and as tuples of local factor indices.
struct StarRelation {
  Relation relation;
  Relation local;
  std::vector<StarFactor> factors;

  std::size_t star_arity() const { return factors.size(); }
  /// First raw coordinate of each factor block.
  std::vector<std::size_t> offsets() const;
  /// For each tuple of `local`, the index of its class under the product of the alphas.
  std::vector<std::size_t> alpha_classes() const;
  std::size_t alpha_index() const;
  /// Least tuple index of `local` in every alpha class, in class order.
  std::vector<std::size_t> class_representatives() const;
};

/// Throws std::invalid_argument when an entry is outside its factor.
StarRelation star_from_local(std::vector<StarFactor> factors, const Relation& local);
StarRelation star_from_relation(std::vector<StarFactor> factors, const Relation& raw);

/// B_i is isomorphic to U/theta for a subalgebra U of A.
struct SectionWitness {
  Relation subalgebra;
  Partition theta;
  HomMap iso;  // B_i -> quotient(U, theta)
};

std::optional<SectionWitness> find_section(const Algebra& A, const Algebra& B, const Budget& budget = {});

struct StarBounds {
  std::size_t max_power = 1;
  std::optional<std::uint64_t> max_index;  // unchecked when absent
};

/// Conditions for membership of B in the bounded-index abelian class.
struct StarCheck {
  bool powers_ok = false;    // p_i <= max_power
  bool sections_ok = false;  // each B_i is a section of A
  bool alphas_ok = false;    // each alpha_i nontrivial and abelian
  bool subdirect = false;    // compatible and onto every factor
  bool index_ok = false;     // product of alphas has index within max_index
  std::size_t index = 0;
  std::vector<std::optional<SectionWitness>> sections;
  std::vector<std::string> violations;
  bool ok() const { return powers_ok && sections_ok && alphas_ok && subdirect && index_ok; }
};

StarCheck star_check(const Algebra& A, const StarRelation& B, const StarBounds& bounds, const Budget& budget = {});

struct ReductionOptions {
  /// One splitting triple per coordinate, indices into that coordinate's table.
  std::optional<std::vector<SplittingTriple>> splits;
  Budget budget;
};

/// Every critical relation replaced by a bounded-index abelian relation B
/// that, with relations of arity <= 1 + p, entails it.
struct ReductionResult {
  Relation input;
  ReducedRepresentation rep;
  std::vector<std::size_t> triple_class;  // least coordinate with equal factor and triple
  std::vector<std::size_t> coordinate_class;     // least coordinate additionally with identity iota
  std::vector<std::size_t> triple_transversal, transversal;
  std::vector<SplittingTriple> splits;  // per coordinate, equal across approx classes
  Relation lifted;                      // local indices into the coordinate factors
  /// factor_maps[i][x]: local index in star.factors[i] of the image of x.
  std::vector<std::vector<std::size_t>> factor_maps;
  std::vector<QEmbedding> embeddings;
  StarRelation star;                 // B
  std::vector<Relation> beta_map_graphs;    // over A, arity 1 + p_i
  std::vector<Relation> factor_map_graphs;  // over A, arity 1 + p_i
  Relation witness;                  // X over A, arity n + sum p_i
  AxiomSet axioms;
  Derivation derivation;  // axioms entail the input
};

/// Throws HypothesisError when C is not critical, too short, or some
/// coordinate triple has no splitting triple (named in the message).
ReductionResult build_reduction(const Algebra& A, const Relation& C, const TermWitness& parallelogram,
                                const ReductionOptions& options = {});

struct ReductionClaims {
  bool classwise_alpha = false;
  bool lift_exists = false;        // every c has a lift l, l beta c, equal to c on T
  bool lift_unique = false;        // such d agree modulo kappa
  bool d_subdirect = false;
  bool d_compatible = false;
  bool transversal_projection = false;  // proj_T(lifted) = proj_T(C)
  bool beta_saturation = false;         // lifted[beta] = C
  bool kappa_saturation = false;        // lifted[kappa] = lifted
  std::size_t d_alpha_index = 0, transversal_image = 0;
  std::uint64_t transversal_bound = 0;  // |A|^|T|
  bool index_bounds = false;
  bool inverse_image = false;  // factor maps pull B back to lifted
  bool index_equality = false;
  bool star_conditions = false;
  bool witness_onto = false;
  bool witness_injective = false;
  bool derivation_accepted = false;
  std::vector<std::string> failures;
  bool ok() const {
    return classwise_alpha && lift_exists && lift_unique && d_subdirect && d_compatible && transversal_projection &&
           beta_saturation && kappa_saturation && index_bounds && inverse_image && index_equality &&
           star_conditions && witness_onto && witness_injective && derivation_accepted;
  }
};

/// Recomputes every claim from the stored data. `index_bound` adds the check
/// against a supplied i and `max_power` bounds the factor powers.
ReductionClaims verify_reduction_claims(const Algebra& A, const ReductionResult& r, std::size_t max_power,
                                 std::optional<std::uint64_t> index_bound = std::nullopt, const Budget& budget = {});

/// y = d(...d(d(x_1, x_{e+1}, x_2), x_{e+1}, x_3)..., x_{e+1}, x_e); needs e >= 2.
Elem nested_difference(const Algebra& C, const Term& d, std::span<const Elem> xs, std::vector<Elem>& scratch);

/// Module maps of coordinates i and j agree iff coordinates i and j carry the same factor and constants
/// and (o_1, .., u, .., -u, .., o_n) lies in B for every representative o
/// and every u in the class group of o_i.
struct ModuleMaps {
  std::vector<std::size_t> representatives;  // tuple indices of B.local, one per alpha class
  std::vector<std::size_t> map_class;        // least coordinate with the same module map
  std::size_t distinct() const;
};

ModuleMaps module_maps(const StarRelation& B, const Term& d, const Budget& budget = {});

/// Saturation of B under the product of the alphas, as local tuples.
Relation saturation(const StarRelation& B, const Budget& budget = {});

/// B equals its saturation or has exactly one upper cover among the
/// subuniverses between B and its saturation.
bool irreducible_in_saturation(const StarRelation& B, const Budget& budget = {});
/// Completely intersection-irreducible subuniverses between B and its
/// saturation whose intersection is B.
std::vector<StarRelation> irreducible_components(const StarRelation& B, const Budget& budget = {});

/// Collapsing the first coordinate when alpha restricted to its projection is trivial.
struct CollapseResult {
  std::vector<std::size_t> representative;  // each local element of the first factor to its representative
  Relation collapse_graph;                  // graph of representative, local pairs
  Relation rest;                // first coordinate dropped
  bool kernel_is_alpha = false;
  bool reconstructs = false;  // B = {(y, x) : x in rest, (x_partner, y) in collapse_graph}
};

/// The partner coordinate (index into the remaining coordinates) must carry
/// the same factor as the first. Throws HypothesisError when alpha is not
/// trivial on the first projection.
CollapseResult collapse_first_coordinate(const StarRelation& B, std::size_t partner, const Budget& budget = {});

struct ArityReduction {
  bool applicable = false;
  std::string reason;
  std::size_t exponent = 0;
  std::vector<std::size_t> block;        // the exponent + 2 coordinates of the input
  std::vector<std::size_t> permutation;  // new coordinate j is old permutation[j]
  ModuleMaps maps;
  StarRelation permuted;
  Relation saturated;  // of the permuted relation
  Relation summed;    // (y, x_{e+2}, ..., x_n), first entry local to the block factor
  Relation sum_graph; // (y, x_1, ..., x_{e+1})
  Relation joined; // (y, x_1, ..., x_n)
  bool collapsed = false;
  std::optional<CollapseResult> collapse;
  StarRelation reduced;  // star arity n - exponent, or n - exponent - 1 after a collapse
  std::size_t tuples_checked = 0;
  bool alpha_related = false;   // x_1..x_{e+1} share an alpha class on the saturation
  bool y_equivalence = false;   // membership equivalence on the saturation
  bool y_is_sum = false;        // y = x_1 + ... + x_{e+1} in the class group
  bool w_injective = false;
  bool w_onto = false;
  bool ok() const { return applicable && alpha_related && y_equivalence && y_is_sum && w_injective && w_onto; }
};

/// Throws HypothesisError if B is not intersection-irreducible in its
/// saturation or d fails on some class; returns applicable = false when no
/// exponent + 2 coordinates share module and module map.
ArityReduction lm_main_reduce(const Algebra& A, const StarRelation& B, const Term& d, std::size_t exponent,
                              const Budget& budget = {});

struct IterationResult {
  std::vector<std::size_t> arities;  // star arity after each round, starting with the input
  std::vector<std::pair<std::size_t, std::size_t>> steps;  // (before, after) per round
  std::size_t rounds = 0;
  std::size_t components = 0;  // intersection splits performed
  AxiomSet axioms;
  Derivation derivation;
  DerivationReport replay;
};

/// Repeats the arity reduction until it stops applying or the star arity is
/// at most `floor`, and certifies the input from the remaining relations.
IterationResult iterate_reduction(const Algebra& A, const StarRelation& B, const Term& d, std::size_t exponent,
                                  std::size_t floor = 0, const Budget& budget = {});

}  // namespace algwb
