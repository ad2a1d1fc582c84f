#include <doctest.h>

#include <random>

#include "algwb/closure.hpp"
#include "algwb/congruence.hpp"
#include "algwb/corpus.hpp"
#include "algwb/homomorphism.hpp"
#include "oracles.hpp"

using namespace algwb;

namespace {

std::vector<Algebra> small_corpus() {
  return {corpus::trivial_algebra(), corpus::cyclic_group(2), corpus::cyclic_group(3), corpus::cyclic_group(4),
          corpus::klein_group(),     corpus::two_element_lattice(), corpus::two_element_semilattice(),
          corpus::trivial_group()};
}

Relation rel(std::size_t arity, std::vector<std::vector<Elem>> t) { return Relation::from_tuples(arity, t); }

}  // namespace

TEST_CASE("algebra validation") {
  CHECK_THROWS_AS(Algebra("bad", 2, {Operation{"f", 1, {0, 2}}}), std::invalid_argument);
  CHECK_THROWS_AS(Algebra("bad", 2, {Operation{"f", 2, {0, 1}}}), std::invalid_argument);
  CHECK_THROWS_AS(Algebra("bad", 2, {Operation{"f", 1, {0, 1}}, Operation{"f", 1, {1, 0}}}), std::invalid_argument);
  const Algebra z2 = corpus::cyclic_group(2);
  CHECK(z2.num_ops() == 3);
  CHECK(z2.apply(0, {1, 1}) == 0);
}

TEST_CASE("S3 tables satisfy the group axioms") {
  const Algebra s3 = corpus::symmetric_group3();
  const Elem e = s3.op(2).table[0];
  for (Elem a = 0; a < 6; ++a) {
    CHECK(s3.apply(0, {a, e}) == a);
    CHECK(s3.apply(0, {a, s3.apply(1, {a})}) == e);
    for (Elem b = 0; b < 6; ++b)
      for (Elem c = 0; c < 6; ++c)
        CHECK(s3.apply(0, {s3.apply(0, {a, b}), c}) == s3.apply(0, {a, s3.apply(0, {b, c})}));
  }
}

TEST_CASE("generate_subuniverse examples") {
  const Algebra z2 = corpus::cyclic_group(2);
  CHECK(generate_subuniverse(z2, rel(1, {{1}})) == rel(1, {{0}, {1}}));
  CHECK(generate_subuniverse(corpus::two_element_lattice(), rel(2, {{0, 1}})) == rel(2, {{0, 1}}));
  CHECK(generate_subuniverse(z2, rel(3, {{1, 1, 0}, {1, 0, 1}})) ==
        rel(3, {{0, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}}));
}

TEST_CASE("generate_subuniverse agrees with naive fixpoint, is idempotent and monotone") {
  std::mt19937 rng(11);
  for (int iter = 0; iter < 60; ++iter) {
    const std::size_t n = 2 + iter % 3;
    const Algebra A = oracle::random_algebra(rng, n);
    const std::size_t w = 1 + iter % 3;
    std::uniform_int_distribution<int> d(0, static_cast<int>(n) - 1);
    std::vector<std::vector<Elem>> gens(1 + iter % 3, std::vector<Elem>(w));
    for (auto& g : gens)
      for (auto& x : g) x = static_cast<Elem>(d(rng));
    const Relation G = Relation::from_tuples(w, gens);
    const Relation S = generate_subuniverse(A, G);
    std::set<std::vector<Elem>> seed(gens.begin(), gens.end());
    auto naive = oracle::naive_closure(A, seed, w);
    CHECK(S == Relation::from_tuples(w, {naive.begin(), naive.end()}));
    CHECK(generate_subuniverse(A, S) == S);
    const Relation G2 = G.unite(rel(w, {std::vector<Elem>(w, static_cast<Elem>(d(rng)))}));
    CHECK(S.subset_of(generate_subuniverse(A, G2)));
  }
}

TEST_CASE("closure budget fails loudly") {
  Budget tiny{3};
  CHECK_THROWS_AS(generate_subuniverse(corpus::cyclic_group(4), rel(2, {{1, 0}, {0, 1}}), tiny), BudgetExceeded);
}

TEST_CASE("principal congruence examples") {
  const Algebra z4 = corpus::cyclic_group(4);
  CHECK(principal_congruence(z4, 1, 1).is_identity());
  CHECK(principal_congruence(z4, 0, 2) == Partition::from_blocks(4, {{0, 2}, {1, 3}}));
  CHECK(principal_congruence(corpus::cyclic_group(2), 0, 1).is_full());
}

TEST_CASE("principal congruence equals oracle on the corpus") {
  auto algebras = small_corpus();
  std::mt19937 rng(5);
  for (int i = 0; i < 25; ++i) algebras.push_back(oracle::random_algebra(rng, 2 + i % 3));
  for (const auto& A : algebras)
    for (Elem a = 0; a < A.size(); ++a)
      for (Elem b = 0; b < A.size(); ++b)
        CHECK(principal_congruence(A, a, b) == oracle::least_congruence_containing(A, a, b));
}

TEST_CASE("congruence lattice examples") {
  CHECK(CongruenceLattice::compute(corpus::cyclic_group(2)).size() == 2);
  const auto s3 = CongruenceLattice::compute(corpus::symmetric_group3());
  REQUIRE(s3.size() == 3);
  CHECK(s3[1] == corpus::s3_alternating_partition());
  CHECK(s3.covers(0, 1));
  CHECK(s3.covers(1, 2));
  CHECK(CongruenceLattice::compute(corpus::klein_group()).size() == 5);
  CHECK(CongruenceLattice::compute(corpus::trivial_algebra()).size() == 1);
}

TEST_CASE("congruence lattice invariants and oracle agreement") {
  auto algebras = small_corpus();
  algebras.push_back(corpus::symmetric_group3());
  std::mt19937 rng(9);
  for (int i = 0; i < 20; ++i) algebras.push_back(oracle::random_algebra(rng, 2 + i % 4));
  for (const auto& A : algebras) {
    const auto L = CongruenceLattice::compute(A);
    auto brute = oracle::all_congruences(A);
    std::sort(brute.begin(), brute.end());
    auto mine = L.elements();
    std::sort(mine.begin(), mine.end());
    CHECK(mine == brute);
    CHECK(L[L.bottom()].is_identity());
    CHECK(L[L.top()].is_full());
    for (std::size_t i = 0; i < L.size(); ++i)
      for (std::size_t j = 0; j < L.size(); ++j) {
        CHECK(L[L.meet(i, j)] == L[i].meet(L[j]));
        CHECK(L[L.join(i, j)] == L[i].join(L[j]));
        if (L.covers(i, j))
          for (std::size_t k = 0; k < L.size(); ++k)
            CHECK_FALSE((k != i && k != j && L.leq(i, k) && L.leq(k, j)));
      }
  }
}

TEST_CASE("homomorphism examples") {
  const Algebra z2 = corpus::cyclic_group(2);
  const Algebra l2 = corpus::two_element_lattice();
  auto h = homomorphisms(z2, z2);
  // 0 is a named constant, so only maps fixing 0 qualify
  REQUIRE(h.size() == 2);
  CHECK(h[0].image == std::vector<Elem>{0, 0});
  CHECK(h[1].image == std::vector<Elem>{0, 1});
  CHECK(homomorphisms(l2, l2).size() == 3);
  HomSearchOptions opt;
  opt.fixed = {Elem{1}, std::nullopt};
  CHECK(homomorphisms(z2, z2, opt).empty());
}

TEST_CASE("homomorphism search equals exhaustive enumeration") {
  auto algebras = small_corpus();
  algebras.push_back(corpus::symmetric_group3());
  std::mt19937 rng(3);
  for (int i = 0; i < 10; ++i) algebras.push_back(oracle::random_algebra(rng, 2 + i % 2));
  for (const auto& S : algebras)
    for (const auto& T : algebras) {
      if (!S.same_signature(T)) continue;
      auto mine = homomorphisms(S, T);
      std::vector<std::vector<Elem>> imgs;
      for (const auto& m : mine) {
        CHECK(m.verify());
        imgs.push_back(m.image);
      }
      CHECK(imgs == oracle::all_homomorphisms(S, T));
    }
}

TEST_CASE("subalgebras") {
  CHECK(subalgebras(corpus::cyclic_group(2)).size() == 2);
  const auto s3 = subalgebras(corpus::symmetric_group3());
  REQUIRE(s3.size() == 6);
  std::vector<std::size_t> sizes;
  for (const auto& s : s3) sizes.push_back(s.size());
  CHECK(sizes == std::vector<std::size_t>{1, 2, 2, 2, 3, 6});
  CHECK(subalgebras(corpus::two_element_lattice()).size() == 3);

  std::mt19937 rng(21);
  for (int i = 0; i < 15; ++i) {
    const Algebra A = oracle::random_algebra(rng, 3 + i % 2);
    const auto subs = subalgebras(A);
    std::set<Relation> have(subs.begin(), subs.end());
    for (const auto& U : subs) CHECK(is_subuniverse(A, U));
    // closure of every nonempty subset appears
    for (unsigned mask = 1; mask < (1u << A.size()); ++mask) {
      std::vector<Elem> el;
      for (Elem x = 0; x < A.size(); ++x)
        if (mask >> x & 1) el.push_back(x);
      CHECK(have.count(generate_subuniverse(A, 1, el)) == 1);
    }
  }
}

TEST_CASE("quotients and products") {
  const Algebra s3 = corpus::symmetric_group3();
  const auto q = quotient(s3, corpus::s3_alternating_partition());
  CHECK(q.algebra.size() == 2);
  CHECK(q.natural.verify());
  CHECK(quotient(s3, Partition::identity(6)).algebra == s3);
  CHECK(quotient(s3, Partition::full(6)).algebra.size() == 1);
  CHECK_THROWS_AS(quotient(s3, Partition::from_blocks(6, {{0, 1}, {2}, {3}, {4}, {5}})), std::invalid_argument);

  const Algebra z2 = corpus::cyclic_group(2), z3 = corpus::cyclic_group(3);
  const std::vector<Algebra> f{z2, z3};
  const auto p = direct_product(f);
  CHECK(p.algebra.size() == 6);
  for (const auto& pr : p.projections) CHECK(pr.verify());
  CHECK(isomorphism(p.algebra, corpus::cyclic_group(6)).has_value());
  const std::vector<Algebra> one{z3};
  CHECK(isomorphism(direct_product(one).algebra, z3).has_value());
  CHECK_THROWS_AS(direct_product(std::vector<Algebra>{z2, corpus::two_element_lattice()}), std::invalid_argument);
}

TEST_CASE("partition lattice laws on random partitions") {
  std::mt19937 rng(17);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + i % 7;
    const Partition a = oracle::random_partition(rng, n), b = oracle::random_partition(rng, n);
    CHECK(a.meet(b).leq(a));
    CHECK(a.leq(a.join(b)));
    CHECK(a.join(a.meet(b)) == a);
    CHECK(a.meet(a.join(b)) == a);
    CHECK(a.join(b) == b.join(a));
    for (std::size_t x = 0; x < n; ++x) {
      CHECK(a.rep(a.rep(x)) == a.rep(x));
      CHECK(a.rep(x) <= x);
    }
  }
}
