#include <doctest.h>

#include <random>

#include "algwb/corpus.hpp"
#include "algwb/io.hpp"
#include "oracles.hpp"

using namespace algwb;

namespace {

Relation random_relation(std::mt19937& rng, std::size_t n, std::size_t arity) {
  std::vector<Elem> flat;
  const std::size_t count = 1 + rng() % 12;
  for (std::size_t i = 0; i < count * arity; ++i) flat.push_back(static_cast<Elem>(rng() % n));
  return Relation(arity, std::move(flat));
}

DerivationStep random_step(std::mt19937& rng) {
  switch (rng() % 7) {
    case 0: return DerivationStep::axiom_step("R" + std::to_string(rng() % 5));
    case 1: return DerivationStep::equality(2);
    case 2: return DerivationStep::full(1 + rng() % 3);
    case 3: return DerivationStep::intersect(rng() % 9, rng() % 9);
    case 4: return DerivationStep::product(rng() % 9, rng() % 9);
    case 5: return DerivationStep::permute(rng() % 9, {2, 0, 1});
    default: {
      std::optional<Relation> retraction;
      if (rng() % 2) retraction = random_relation(rng, 3, 4);
      return DerivationStep::retract_project(rng() % 9, {0, 2}, retraction);
    }
  }
}

bool same_step(const DerivationStep& a, const DerivationStep& b) {
  return a.kind == b.kind && a.axiom == b.axiom && a.arity == b.arity && a.first == b.first &&
         a.second == b.second && a.coordinates == b.coordinates && a.retraction == b.retraction;
}

}  // namespace

TEST_CASE("io round trips on random structures") {
  std::mt19937 rng(4242);
  for (int round = 0; round < 60; ++round) {
    const std::size_t n = 1 + rng() % 5;
    const Algebra A = oracle::random_algebra(rng, n);
    const auto A2 = io::algebra_from_json(io::parse(io::to_json(A).dump()));
    CHECK(A2 == A);
    CHECK(A2.name() == A.name());

    const Relation R = random_relation(rng, n, 1 + rng() % 4);
    CHECK(io::relation_from_json(io::parse(io::to_json(R).dump())) == R);

    const Partition p = oracle::random_partition(rng, n);
    CHECK(io::partition_from_json(io::parse(io::to_json(p).dump())) == p);

    Derivation d;
    for (std::size_t k = 0, len = 1 + rng() % 8; k < len; ++k) d.add(random_step(rng));
    const auto d2 = io::derivation_from_json(io::parse(io::to_json(d).dump()));
    REQUIRE(d2.steps.size() == d.steps.size());
    for (std::size_t k = 0; k < d.steps.size(); ++k) CHECK(same_step(d.steps[k], d2.steps[k]));
  }
}

TEST_CASE("io corpus algebras and emitted text") {
  for (const Algebra& A : {corpus::symmetric_group3(), corpus::cyclic_group(4), corpus::two_element_lattice(),
                           corpus::trivial_algebra()})
    CHECK(io::algebra_from_json(io::to_json(A)) == A);
  // Blocks are sorted by least element.
  const auto p = Partition::from_blocks(4, {{3, 1}, {2}, {0}});
  CHECK(io::to_json(p).dump() == "[[0],[1,3],[2]]");
  CHECK(io::partition_from_json(io::parse("\"1\""), 3).is_full());
  CHECK(io::partition_from_json(io::parse("\"0\""), 3).is_identity());
  const auto z2 = corpus::cyclic_group(2);
  CHECK(io::to_json(z2).dump() ==
        R"({"name":"Z2","size":2,"ops":[{"name":"+","arity":2,"table":[0,1,1,0]},)"
        R"({"name":"-","arity":1,"table":[0,1]},{"name":"0","arity":0,"table":[0]}]})");
}

TEST_CASE("io axioms and star relations") {
  const Algebra Z2 = corpus::cyclic_group(2);
  AxiomSet ax{{"E", Relation::equality(2)}, {"P", Relation(3, {0, 0, 0, 0, 1, 1, 1, 0, 1, 1, 1, 0})}};
  CHECK(io::axioms_from_json(io::parse(io::to_json(ax).dump())) == ax);

  const auto plain = io::star_from_json(Z2, io::to_json(ax.at("P")));
  CHECK(plain.star_arity() == 3);
  CHECK(plain.relation == ax.at("P"));
  CHECK(plain.factors[0].alpha.is_full());
  const auto again = io::star_from_json(Z2, io::parse(io::to_json(plain).dump()));
  CHECK(again.relation == plain.relation);
  CHECK(again.factors == plain.factors);
}

TEST_CASE("io rejects malformed documents") {
  const auto bad = [](const char* text) {
    return io::algebra_from_json(io::parse(text));
  };
  CHECK_THROWS_AS(io::parse("{\"name\": "), ParseError);
  CHECK_THROWS_AS(bad(R"({"size": 2, "ops": []})"), ParseError);
  CHECK_THROWS_AS(bad(R"({"name": "x", "size": 2, "ops": [{"name": "f", "arity": 1, "table": [0]}]})"), ParseError);
  CHECK_THROWS_AS(bad(R"({"name": "x", "size": 2, "ops": [{"name": "f", "arity": 1, "table": [0, 2]}]})"),
                  ParseError);
  CHECK_THROWS_AS(bad(R"({"name": "x", "size": -1, "ops": []})"), ParseError);
  CHECK_THROWS_AS(io::relation_from_json(io::parse(R"({"arity": 2, "tuples": [[0, 1, 0]]})")), ParseError);
  CHECK_THROWS_AS(io::partition_from_json(io::parse("[[0, 1], [1]]")), ParseError);
  CHECK_THROWS_AS(io::partition_from_json(io::parse("[[0], [2]]")), ParseError);
  CHECK_THROWS_AS(io::step_from_json(io::parse(R"({"kind": "union", "first": 0})")), ParseError);
  CHECK_THROWS_AS(io::read_file("/nonexistent/algebra.json"), ParseError);
  const Algebra Z2 = corpus::cyclic_group(2);
  CHECK_THROWS_AS(io::star_from_json(Z2, io::parse(R"({"arity": 1, "tuples": [[3]]})")), ParseError);
}
