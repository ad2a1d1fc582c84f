#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "algwb/algebra.hpp"
#include "algwb/commutator.hpp"
#include "algwb/relation.hpp"

namespace algwb {

/// Homomorphisms B -> A whose joint kernel is kappa, witnessing B/kappa in SP(A).
struct QEmbedding {
  std::vector<HomMap> maps;
  bool minimal = true;  // false when the number of maps came from the greedy fallback
  std::size_t power() const { return maps.size(); }
  /// x -> (maps[0](x), ..., maps[p-1](x)).
  std::vector<Elem> tuple(Elem x) const;
};

/// Largest number of maps for which the exact minimum is searched.
inline constexpr std::size_t kExactPowerBound = 6;

/// Every pair outside kappa separated by a homomorphism into A with kernel
/// above kappa, or absent. B and A share a signature; kappa is a congruence of B.
std::optional<QEmbedding> is_q_congruence(const Algebra& A, const Algebra& B, const Partition& kappa,
                                          const Budget& budget = {});

struct SplittingTriple {
  std::size_t alpha = 0, beta = 0, kappa = 0;  // lattice indices of the table of B
  QEmbedding embedding;
  std::string route;
};

/// Conditions on (alpha, beta, kappa) against a relevant triple of B = T.algebra().
struct SplitConditions {
  bool q_congruence = false;          // embedding checked jointly injective on B/kappa
  bool beta_below_delta = false;
  bool meet_is_kappa = false;
  bool join_is_nu = false;
  bool alpha_abelian_mod_kappa = false;
  bool all() const { return q_congruence && beta_below_delta && meet_is_kappa && join_is_nu && alpha_abelian_mod_kappa; }
};

SplitConditions verify_splitting(const Algebra& A, const CommutatorTable& T, const RelevantTriple& t,
                                 const SplittingTriple& s);

/// Fast candidates first, then the lexicographic search of Con(B)^3. Every
/// candidate is re-verified before it is returned.
std::optional<SplittingTriple> find_splitting_triple(const Algebra& A, const CommutatorTable& T,
                                                     const RelevantTriple& t, const CmGuard& guard,
                                                     const Budget& budget = {});

/// Every splitting (alpha, beta, kappa) in lexicographic order of indices,
/// each with a minimal embedding.
std::vector<SplittingTriple> all_splitting_triples(const Algebra& A, const CommutatorTable& T,
                                                   const RelevantTriple& t, const Budget& budget = {});

struct SplitEntry {
  Subpower subalgebra;
  RelevantTriple triple;  // indices into the table of the subalgebra
  Partition delta, theta, nu;  // on local indices of the subalgebra
  std::optional<SplittingTriple> split;
  /// Least embedding power over all splitting triples of this entry.
  std::optional<std::size_t> least_power;
  bool least_power_exact = true;
};

struct SplitLedger {
  std::vector<SplitEntry> entries;
  bool pass() const;
  /// First entry without a splitting triple.
  const SplitEntry* first_failure() const;
};

SplitLedger split_centralizer_condition(const Algebra& A, const CmGuard& guard, const Budget& budget = {});

struct Constants {
  std::size_t automorphisms = 0;  // largest automorphism group of a relevant quotient
  std::size_t sections = 0;       // distinct (subalgebra, delta) pairs
  std::size_t power = 1;          // largest least embedding power
  std::size_t exponent = 1;       // lcm of the class group exponents
  std::size_t arity_bound = 0;    // max(1 + power, k - 1)
  /// |A|^(automorphisms * sections); absent when it does not fit in 64 bits.
  std::optional<std::uint64_t> index_bound;
  std::size_t index_base = 0, index_exponent = 0;
  bool degenerate = false;               // no relevant triples anywhere
  bool power_is_upper_bound = false;     // greedy embeddings were involved
  bool exponent_is_lower_bound = false;  // enumeration of the modules stopped at the budget
  std::vector<std::string> notes;
};

/// Requires a passing ledger; throws HypothesisError otherwise.
Constants constants(const Algebra& A, std::size_t k, const SplitLedger& ledger, const Budget& budget = {});

enum class SiClass { Abelian, Neutral, AlmostNeutral, Other };
const char* si_class_name(SiClass c);

/// Throws std::invalid_argument unless S is subdirectly irreducible.
SiClass classify_si(const Algebra& S, const CmGuard& guard, const Budget& budget = {});

struct SolvableC8Factorization {
  bool applicable = false;  // every subdirectly irreducible section is solvable or (C8)
  std::string inapplicable_reason;
  Partition sigma, rho;
  bool complementary = false;   // sigma meet rho = 0, sigma join rho = 1
  bool permuting = false;
  bool product_congruences = false;  // chi = (chi v sigma) ^ (chi v rho) for every chi
  /// Only when every subdirectly irreducible section is abelian or (C8).
  std::optional<bool> derived_and_center;
  bool ok() const {
    return applicable && complementary && permuting && product_congruences && derived_and_center.value_or(true);
  }
};

SolvableC8Factorization solvable_c8_factorization(const Algebra& A, const CmGuard& guard, const Budget& budget = {});

/// When the algebra is a group (some binary operation with identity and
/// inverses), one Sylow subgroup per prime tested for commutativity.
/// Throws std::invalid_argument when it is not.
bool sylow_abelian_check(const Algebra& G);

enum class Verdict { Dualizable, Unknown };
const char* verdict_name(Verdict v);

struct DualizabilityReport {
  Verdict verdict = Verdict::Unknown;
  std::optional<std::size_t> parallelogram_k;
  std::optional<SplitLedger> ledger;
  std::optional<Constants> constants;
  bool residually_small = false;
  std::vector<std::pair<std::string, SiClass>> si_sections;
  std::vector<std::string> evidence;
};

DualizabilityReport dualizability_report(const Algebra& A, std::size_t k_max = 4, const Budget& budget = {});

}  // namespace algwb
