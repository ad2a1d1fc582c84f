#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "algwb/algebra.hpp"
#include "algwb/commutator.hpp"
#include "algwb/relation.hpp"

namespace algwb {

/// Nonempty, entries inside the universe, closed under every operation.
bool is_compatible(const Algebra& A, const Relation& rho, const Budget& budget = {});

/// A retraction of proj_I(B) back into B, stored as its graph
/// {(b', phi(b'))} of arity |I| + arity(B).
struct Retraction {
  Relation graph;
  HomMap map;  // on the subpower algebras of proj_I(B) and B
};

/// First homomorphism phi: proj_I(B) -> B with proj_I o phi = id, or absent.
/// `coordinates` must be strictly increasing.
std::optional<Retraction> retraction_exists(const Algebra& A, const Relation& B,
                                            const std::vector<std::size_t>& coordinates, const Budget& budget = {});

struct DerivationStep {
  enum class Kind { Axiom, Equality, Full, Intersect, Product, Permute, RetractProject };
  static constexpr std::size_t kKinds = 7;

  Kind kind = Kind::Axiom;
  std::string axiom;                     // Axiom
  std::size_t arity = 0;                 // Equality, Full
  std::size_t first = 0, second = 0;     // indices of earlier steps
  std::vector<std::size_t> coordinates;  // Permute: new[j] = old[coordinates[j]]; RetractProject: kept, increasing
  std::optional<Relation> retraction;    // RetractProject; absent means the projection must be bijective

  static DerivationStep axiom_step(std::string name);
  static DerivationStep equality(std::size_t arity);
  static DerivationStep full(std::size_t arity);
  static DerivationStep intersect(std::size_t a, std::size_t b);
  static DerivationStep product(std::size_t a, std::size_t b);
  static DerivationStep permute(std::size_t a, std::vector<std::size_t> perm);
  static DerivationStep retract_project(std::size_t a, std::vector<std::size_t> kept,
                                        std::optional<Relation> retraction = std::nullopt);
};

const char* kind_name(DerivationStep::Kind k);

/// The relation of the last step is the derived one.
struct Derivation {
  std::vector<DerivationStep> steps;
  std::size_t add(DerivationStep s) {
    steps.push_back(std::move(s));
    return steps.size() - 1;
  }
};

using AxiomSet = std::map<std::string, Relation>;

class DerivationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output of one step given the outputs of the earlier ones. Throws
/// DerivationError when a side condition fails.
Relation apply_construct(const Algebra& A, const DerivationStep& step, const std::vector<Relation>& earlier,
                         const AxiomSet& axioms, const Budget& budget = {});

struct DerivationReport {
  bool accepted = false;
  std::optional<std::size_t> failed_step;
  std::string reason;
  std::optional<Relation> result;
  std::array<std::size_t, DerivationStep::kKinds> step_counts{};
  std::size_t bijective_projections = 0;
  std::size_t retractive_projections = 0;
};

/// Replays d, checking every side condition; accepts iff the final relation
/// equals goal. Axioms are checked for compatibility and every construction
/// preserves it. `recheck_outputs` also closes each nonaxiom output under A.
DerivationReport check_derivation(const Algebra& A, const AxiomSet& axioms, const Derivation& d, const Relation& goal,
                                  const Budget& budget = {}, bool recheck_outputs = false);

/// One conjunct R(x_{v_0}, ..., x_{v_{r-1}}) with distinct variables.
struct Atom {
  std::string axiom;
  std::vector<std::size_t> variables;
};

/// Derivation of {x in A^arity : every atom holds} from its atoms using
/// products with full relations, permutations and intersections.
Derivation conjunction_derivation(const AxiomSet& axioms, std::size_t arity, const std::vector<Atom>& atoms);

struct CriticalVerdict {
  bool irreducible = false;
  bool indecomposable = false;
  bool critical() const { return irreducible && indecomposable; }
  /// A tuple outside rho lying in every proper compatible extension.
  std::optional<std::vector<Elem>> irreducibility_witness;
  /// A bipartition (I, J) with rho = proj_I(rho) x proj_J(rho) up to regrouping.
  std::optional<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> factorization;
  bool full_relation = false;  // rho = A^n, counted as irreducible
};

CriticalVerdict is_critical(const Algebra& A, const Relation& rho, const Budget& budget = {});

/// Coordinate i of a reduced representation. Elements of `algebra` are
/// indices into proj_i(C).
struct CoordinateFactor {
  Subpower algebra;
  CommutatorTable table;
  std::size_t delta = 0, theta = 0, nu = 0;  // lattice indices of table
  bool degenerate = false;                   // delta is the full congruence
  bool abelian = false;                      // [theta, theta] <= delta

  friend bool operator==(const CoordinateFactor& a, const CoordinateFactor& b) {
    return a.algebra.universe == b.algebra.universe && a.delta == b.delta && a.theta == b.theta && a.nu == b.nu;
  }
};

struct ReducedRepresentation {
  Relation relation;  // C
  Relation local;     // C with coordinate i re-indexed into proj_i(C)
  std::vector<CoordinateFactor> factors;
  /// iota(i, j): A_i/nu_i -> A_j/nu_j on quotient elements. Empty when degenerate.
  std::vector<HomMap> iotas;

  bool degenerate() const;
  bool all_relevant() const;
  const HomMap& iota(std::size_t i, std::size_t j) const { return iotas.at(i * factors.size() + j); }
  /// True when A_i = A_j, the triples agree and iota_ij is the identity.
  bool same_coordinate_class(std::size_t i, std::size_t j) const;
};

/// Throws HypothesisError when some delta_i has more than one upper cover
/// or some iota_ij is not a well-defined isomorphism.
ReducedRepresentation reduced_representation(const Algebra& A, const Relation& C, const CmGuard& guard,
                                             const Budget& budget = {});

}  // namespace algwb
