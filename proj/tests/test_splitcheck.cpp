#include <doctest.h>

#include <algorithm>
#include <set>
#include <tuple>

#include "algwb/closure.hpp"
#include "algwb/congruence.hpp"
#include "algwb/corpus.hpp"
#include "algwb/splitcheck.hpp"
#include "algwb/terms.hpp"
#include "oracles.hpp"

using namespace algwb;

namespace {

CmGuard guard_for(const Algebra& A) {
  const auto w = least_parallelogram_term(A, 4);
  REQUIRE(w.has_value());
  return cm_guard(*w);
}

using PartitionTriple = std::tuple<Partition, Partition, Partition>;

PartitionTriple as_partitions(const CommutatorTable& T, const RelevantTriple& t) {
  return {T[t.delta], T[t.theta], T[t.nu]};
}

PartitionTriple as_partitions(const CommutatorTable& T, const SplittingTriple& s) {
  return {T[s.alpha], T[s.beta], T[s.kappa]};
}

// Joint kernel of every homomorphism into A whose kernel lies above kappa.
bool q_congruence_oracle(const Algebra& A, const Algebra& B, const Partition& kappa) {
  Partition joint = Partition::full(B.size());
  for (const auto& img : oracle::all_homomorphisms(B, A)) {
    const Partition k = Partition::from_labels(std::span<const Elem>(img));
    if (kappa.leq(k)) joint = joint.meet(k);
  }
  return joint == kappa;
}

// Least number of homomorphisms with joint kernel kappa, by trying all subsets.
std::optional<std::size_t> least_power_oracle(const Algebra& A, const Algebra& B, const Partition& kappa) {
  std::vector<Partition> ks;
  for (const auto& img : oracle::all_homomorphisms(B, A)) {
    const Partition k = Partition::from_labels(std::span<const Elem>(img));
    if (kappa.leq(k) && std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
  }
  REQUIRE(ks.size() < 16);
  std::optional<std::size_t> best;
  for (std::size_t mask = 0; mask < (std::size_t{1} << ks.size()); ++mask) {
    Partition j = Partition::full(B.size());
    std::size_t bits = 0;
    for (std::size_t i = 0; i < ks.size(); ++i)
      if (mask >> i & 1) {
        j = j.meet(ks[i]);
        ++bits;
      }
    if (j == kappa && (!best || bits < *best)) best = bits;
  }
  return best;
}

std::set<PartitionTriple> splitting_oracle(const Algebra& A, const Algebra& B, const Partition& delta,
                                           const Partition& nu) {
  std::set<PartitionTriple> out;
  const auto cons = oracle::all_congruences(B);
  for (const auto& alpha : cons)
    for (const auto& beta : cons) {
      if (!beta.leq(delta)) continue;
      const Partition kappa = alpha.meet(beta);
      if (alpha.join(beta) != nu) continue;
      if (!oracle::term_condition_commutator(B, alpha, alpha).leq(kappa)) continue;
      if (!q_congruence_oracle(A, B, kappa)) continue;
      out.emplace(alpha, beta, kappa);
    }
  return out;
}

std::vector<Algebra> split_corpus() {
  return {corpus::cyclic_group(2),        corpus::cyclic_group(3),
          corpus::cyclic_group(4),        corpus::klein_group(),
          corpus::symmetric_group3(),     corpus::symmetric_group3_with_constants(),
          corpus::two_element_lattice(),  corpus::trivial_group(),
          corpus::with_all_constants(corpus::cyclic_group(2))};
}

}  // namespace

TEST_CASE("relevant triples on the worked examples") {
  const Algebra s3 = corpus::symmetric_group3();
  const Partition delta = corpus::s3_alternating_partition();
  const auto T = CommutatorTable::compute(s3);
  std::set<PartitionTriple> got;
  for (const auto& t : relevant_triples(T, guard_for(s3))) got.insert(as_partitions(T, t));
  const Partition zero(6), one = Partition::full(6);
  CHECK(got == std::set<PartitionTriple>{{zero, delta, delta}, {delta, one, one}});

  const Algebra z2 = corpus::cyclic_group(2);
  const auto T2 = CommutatorTable::compute(z2);
  const auto r2 = relevant_triples(T2, guard_for(z2));
  REQUIRE(r2.size() == 1);
  CHECK(as_partitions(T2, r2[0]) == PartitionTriple{Partition(2), Partition::full(2), Partition::full(2)});

  const Algebra l2 = corpus::two_element_lattice();
  CHECK(relevant_triples(CommutatorTable::compute(l2), guard_for(l2)).empty());
}

TEST_CASE("Q-congruences") {
  const Algebra s3 = corpus::symmetric_group3();
  const Partition delta = corpus::s3_alternating_partition();

  SUBCASE("identity relation is witnessed by one inclusion") {
    for (const auto& A : split_corpus()) {
      for (const auto& U : subalgebras(A)) {
        const Subpower S = make_subpower(A, U);
        const auto q = is_q_congruence(A, S.algebra, Partition(S.algebra.size()));
        REQUIRE(q.has_value());
        CHECK(q->power() == (S.algebra.size() == 1 ? 0u : 1u));
        CHECK(q->minimal);
      }
    }
  }
  SUBCASE("S3 modulo A3 embeds once") {
    const auto q = is_q_congruence(s3, s3, delta);
    REQUIRE(q.has_value());
    CHECK(q->power() == 1);
    CHECK(q->maps[0].kernel() == delta);
  }
  SUBCASE("constants leave only the two trivial Q-congruences") {
    const Algebra s3c = corpus::symmetric_group3_with_constants();
    CHECK_FALSE(is_q_congruence(s3c, s3c, delta).has_value());
    CHECK(is_q_congruence(s3c, s3c, Partition(6)).has_value());
    const auto top = is_q_congruence(s3c, s3c, Partition::full(6));
    REQUIRE(top.has_value());
    CHECK(top->power() == 0);
  }
  SUBCASE("Klein group needs two maps into Z2") {
    const auto q = is_q_congruence(corpus::cyclic_group(2), corpus::klein_group(), Partition(4));
    REQUIRE(q.has_value());
    CHECK(q->power() == 2);
    std::set<std::vector<Elem>> images;
    for (Elem x = 0; x < 4; ++x) images.insert(q->tuple(x));
    CHECK(images.size() == 4);
  }
  SUBCASE("matches the brute-force oracle on every congruence of every subalgebra") {
    for (const auto& A : split_corpus()) {
      for (const auto& U : subalgebras(A)) {
        const Subpower S = make_subpower(A, U);
        for (const auto& kappa : oracle::all_congruences(S.algebra)) {
          const auto q = is_q_congruence(A, S.algebra, kappa);
          INFO(A.name(), " ", U.to_string(), " ", kappa.to_string());
          CHECK(q.has_value() == q_congruence_oracle(A, S.algebra, kappa));
          if (q) {
            CHECK(q->power() == least_power_oracle(A, S.algebra, kappa));
            Partition joint = Partition::full(S.algebra.size());
            for (const auto& h : q->maps) {
              CHECK(h.verify());
              joint = joint.meet(h.kernel());
            }
            CHECK(joint == kappa);
          }
        }
      }
    }
  }
  SUBCASE("rejects a non-congruence") {
    CHECK_THROWS_AS(is_q_congruence(s3, s3, Partition::from_blocks(6, {{0, 1}})), std::invalid_argument);
  }
}

TEST_CASE("splitting triples on the worked examples") {
  const Algebra s3 = corpus::symmetric_group3();
  const Partition delta = corpus::s3_alternating_partition();
  const Partition zero(6), one = Partition::full(6);

  SUBCASE("S3 (delta,1,1) is split by (1,delta,delta)") {
    const auto T = CommutatorTable::compute(s3);
    const RelevantTriple t{T.index(delta), T.top(), T.top()};
    const auto s = find_splitting_triple(s3, T, t, guard_for(s3));
    REQUIRE(s.has_value());
    CHECK(as_partitions(T, *s) == PartitionTriple{one, delta, delta});
    CHECK(verify_splitting(s3, T, t, *s).all());
  }
  SUBCASE("S3 with constants leaves (delta,1,1) unsplit") {
    const Algebra s3c = corpus::symmetric_group3_with_constants();
    const auto T = CommutatorTable::compute(s3c);
    REQUIRE(T.size() == 3);
    const RelevantTriple t{T.index(delta), T.top(), T.top()};
    CHECK_FALSE(find_splitting_triple(s3c, T, t, guard_for(s3c)).has_value());
    CHECK(all_splitting_triples(s3c, T, t).empty());
    // (1,delta,delta) fails only on the Q-congruence condition.
    const SplittingTriple bogus{T.top(), T.index(delta), T.index(delta), {}, "manual"};
    const auto c = verify_splitting(s3c, T, t, bogus);
    CHECK_FALSE(c.q_congruence);
    CHECK(c.beta_below_delta);
    CHECK(c.meet_is_kappa);
    CHECK(c.join_is_nu);
    CHECK(c.alpha_abelian_mod_kappa);
  }
  SUBCASE("Z2 (0,1,1) is split by (1,0,0)") {
    const Algebra z2 = corpus::cyclic_group(2);
    const auto T = CommutatorTable::compute(z2);
    const auto s = find_splitting_triple(z2, T, relevant_triples(T, guard_for(z2)).at(0), guard_for(z2));
    REQUIRE(s.has_value());
    CHECK(as_partitions(T, *s) == PartitionTriple{Partition::full(2), Partition(2), Partition(2)});
  }
  SUBCASE("a corrupted embedding fails re-verification") {
    const auto T = CommutatorTable::compute(s3);
    const RelevantTriple t{T.index(delta), T.top(), T.top()};
    auto s = find_splitting_triple(s3, T, t, guard_for(s3));
    REQUIRE(s.has_value());
    REQUIRE_FALSE(s->embedding.maps.empty());
    s->embedding.maps[0].image[1] = s->embedding.maps[0].image[0];
    CHECK_FALSE(verify_splitting(s3, T, t, *s).q_congruence);
  }
}

TEST_CASE("splitting search agrees with the brute-force oracle") {
  for (const auto& A : split_corpus()) {
    const CmGuard guard = guard_for(A);
    for (const auto& U : subalgebras(A)) {
      const Subpower S = make_subpower(A, U);
      const auto T = CommutatorTable::compute(S.algebra);
      for (const auto& t : relevant_triples(T, guard)) {
        INFO(A.name(), " ", U.to_string(), " delta=", T[t.delta].to_string());
        const auto all = all_splitting_triples(A, T, t);
        std::set<PartitionTriple> got;
        for (const auto& s : all) {
          CHECK(verify_splitting(A, T, t, s).all());
          got.insert(as_partitions(T, s));
        }
        CHECK(got == splitting_oracle(A, S.algebra, T[t.delta], T[t.nu]));
        const auto fast = find_splitting_triple(A, T, t, guard);
        CHECK(fast.has_value() == !all.empty());
        if (fast) {
          CHECK(verify_splitting(A, T, t, *fast).all());
          CHECK(got.count(as_partitions(T, *fast)) == 1);
        }
      }
    }
  }
}

TEST_CASE("split centralizer condition ledger") {
  const auto z2 = split_centralizer_condition(corpus::cyclic_group(2), guard_for(corpus::cyclic_group(2)));
  CHECK(z2.pass());
  CHECK(z2.entries.size() == 1);

  const Algebra s3 = corpus::symmetric_group3();
  const auto s3l = split_centralizer_condition(s3, guard_for(s3));
  CHECK(s3l.pass());
  CHECK(s3l.entries.size() == 6);

  const Algebra s3c = corpus::symmetric_group3_with_constants();
  const auto bad = split_centralizer_condition(s3c, guard_for(s3c));
  CHECK_FALSE(bad.pass());
  const auto* f = bad.first_failure();
  REQUIRE(f != nullptr);
  CHECK(f->delta == corpus::s3_alternating_partition());
  CHECK(f->theta.is_full());
  CHECK(f->nu.is_full());

  SUBCASE("a passing ledger implies C1 in every subalgebra") {
    for (const auto& A : split_corpus()) {
      const CmGuard g = guard_for(A);
      if (split_centralizer_condition(A, g).pass()) CHECK(residual_smallness_test(A, g).c1_in_all_subalgebras);
    }
  }
}

TEST_CASE("constants") {
  SUBCASE("Z2") {
    const Algebra z2 = corpus::cyclic_group(2);
    const auto c = constants(z2, 2, split_centralizer_condition(z2, guard_for(z2)));
    CHECK(c.automorphisms == 1);
    CHECK(c.sections == 1);
    CHECK(c.index_bound == 2u);
    CHECK(c.power == 1);
    CHECK(c.exponent == 2);
    CHECK(c.arity_bound == 2);
    CHECK_FALSE(c.degenerate);
    CHECK_FALSE(c.exponent_is_lower_bound);
  }
  SUBCASE("two-element lattice is degenerate") {
    const Algebra l2 = corpus::two_element_lattice();
    const auto c = constants(l2, 3, split_centralizer_condition(l2, guard_for(l2)));
    CHECK(c.degenerate);
    CHECK(c.automorphisms == 0);
    CHECK(c.sections == 0);
    CHECK(c.index_bound == 1u);
    CHECK(c.power == 1);
    CHECK(c.exponent == 1);
    CHECK(c.arity_bound == 2);
  }
  SUBCASE("S3") {
    const Algebra s3 = corpus::symmetric_group3();
    const auto c = constants(s3, 2, split_centralizer_condition(s3, guard_for(s3)));
    CHECK(c.automorphisms == 1);
    CHECK(c.sections == 6);
    CHECK(c.index_bound == 46656u);
    CHECK(c.power == 1);
    CHECK(c.exponent == 6);
  }
  SUBCASE("Klein group") {
    const Algebra v = corpus::klein_group();
    const auto c = constants(v, 2, split_centralizer_condition(v, guard_for(v)));
    CHECK(c.exponent == 2);
    CHECK(c.index_bound.has_value());
    CHECK(c.index_base == 4);
    CHECK(*c.index_bound == checked_power(4, c.index_exponent));
  }
  SUBCASE("failing ledger is rejected") {
    const Algebra s3c = corpus::symmetric_group3_with_constants();
    CHECK_THROWS_AS(constants(s3c, 2, split_centralizer_condition(s3c, guard_for(s3c))), HypothesisError);
  }
}

TEST_CASE("classification of subdirectly irreducible algebras") {
  const Algebra z2 = corpus::cyclic_group(2);
  CHECK(classify_si(z2, guard_for(z2)) == SiClass::Abelian);
  const Algebra l2 = corpus::two_element_lattice();
  CHECK(classify_si(l2, guard_for(l2)) == SiClass::Neutral);
  const Algebra s3 = corpus::symmetric_group3();
  // S3/A3 is abelian, so the interval above the monolith is not neutral.
  CHECK(classify_si(s3, guard_for(s3)) == SiClass::Other);
  CHECK_THROWS_AS(classify_si(corpus::klein_group(), guard_for(corpus::klein_group())), std::invalid_argument);
  CHECK_THROWS_AS(classify_si(corpus::trivial_group(), guard_for(corpus::trivial_group())), std::invalid_argument);

  SUBCASE("labels follow the definitions") {
    for (const auto& A : split_corpus()) {
      const CmGuard g = guard_for(A);
      for (const auto& U : subalgebras(A)) {
        const Subpower S = make_subpower(A, U);
        const auto L = CongruenceLattice::compute(S.algebra);
        for (std::size_t d : L.meet_irreducibles()) {
          const Algebra Q = quotient(S.algebra, L[d]).algebra;
          const auto T = CommutatorTable::compute(Q);
          const SiClass c = classify_si(Q, g);
          CHECK((c == SiClass::Abelian) == (T.comm(T.top(), T.top()) == T.bottom()));
          if (c != SiClass::Abelian) CHECK((c == SiClass::Neutral) == check_identity(T, Identity::C3).holds);
        }
      }
    }
  }
}

TEST_CASE("solvable and C8 factorization") {
  SUBCASE("Z4") {
    const Algebra z4 = corpus::cyclic_group(4);
    const auto f = solvable_c8_factorization(z4, guard_for(z4));
    CHECK(f.ok());
    CHECK(f.sigma.is_identity());
    CHECK(f.rho.is_full());
    CHECK(f.derived_and_center == true);
  }
  SUBCASE("two-element lattice") {
    const Algebra l2 = corpus::two_element_lattice();
    const auto f = solvable_c8_factorization(l2, guard_for(l2));
    CHECK(f.ok());
    CHECK(f.sigma.is_full());
    CHECK(f.rho.is_identity());
    CHECK(f.derived_and_center == true);
  }
  SUBCASE("S3 is solvable") {
    const Algebra s3 = corpus::symmetric_group3();
    const auto f = solvable_c8_factorization(s3, guard_for(s3));
    CHECK(f.ok());
    CHECK(f.sigma.is_identity());
    CHECK(f.rho.is_full());
    CHECK_FALSE(f.derived_and_center.has_value());
  }
  SUBCASE("every congruence factors on the corpus") {
    for (const auto& A : split_corpus()) {
      const auto f = solvable_c8_factorization(A, guard_for(A));
      if (!f.applicable) continue;
      CHECK(f.complementary);
      CHECK(f.permuting);
      for (const auto& chi : oracle::all_congruences(A))
        CHECK(chi.join(f.sigma).meet(chi.join(f.rho)) == chi);
    }
  }
}

TEST_CASE("Sylow subgroups") {
  CHECK(sylow_abelian_check(corpus::symmetric_group3()));
  CHECK(sylow_abelian_check(corpus::cyclic_group(4)));
  CHECK(sylow_abelian_check(corpus::trivial_group()));
  CHECK_FALSE(sylow_abelian_check(corpus::dihedral_group4()));
  CHECK_THROWS_AS(sylow_abelian_check(corpus::two_element_lattice()), std::invalid_argument);
  CHECK_THROWS_AS(sylow_abelian_check(corpus::trivial_algebra()), std::invalid_argument);
}

TEST_CASE("dualizability verdicts") {
  for (const auto& A : {corpus::cyclic_group(2), corpus::cyclic_group(4), corpus::two_element_lattice(),
                        corpus::symmetric_group3()}) {
    INFO(A.name());
    const auto r = dualizability_report(A);
    CHECK(r.verdict == Verdict::Dualizable);
    CHECK(r.constants.has_value());
    CHECK(r.residually_small);
  }
  const auto bad = dualizability_report(corpus::symmetric_group3_with_constants());
  CHECK(bad.verdict == Verdict::Unknown);
  REQUIRE(bad.ledger.has_value());
  CHECK_FALSE(bad.ledger->pass());
  CHECK_FALSE(bad.constants.has_value());

  const auto semi = dualizability_report(corpus::two_element_semilattice(), 3);
  CHECK(semi.verdict == Verdict::Unknown);
  CHECK_FALSE(semi.parallelogram_k.has_value());
  CHECK_FALSE(semi.ledger.has_value());
}
