#pragma once

#include <string>

#include <json.hpp>

#include "algwb/algebra.hpp"
#include "algwb/partition.hpp"
#include "algwb/reduction.hpp"
#include "algwb/relation.hpp"
#include "algwb/relations.hpp"

namespace algwb::io {

using Json = nlohmann::ordered_json;

/// Every reader throws ParseError on malformed documents.
Json parse(const std::string& text);
Json read_file(const std::string& path);
void write_file(const std::string& path, const Json& doc);

/// {name, size, ops: [{name, arity, table}]}, tables row-major.
Json to_json(const Algebra& A);
Algebra algebra_from_json(const Json& j);

/// {arity, tuples: [[...], ...]}.
Json to_json(const Relation& R);
Relation relation_from_json(const Json& j);

/// Block lists sorted by least element.
Json to_json(const Partition& p);
Partition partition_from_json(const Json& j);
/// Accepts block lists or the name "0" / "1"; size is needed for those.
Partition partition_from_json(const Json& j, std::size_t size);

Json to_json(const DerivationStep& s);
DerivationStep step_from_json(const Json& j);
/// {steps: [...]}.
Json to_json(const Derivation& d);
Derivation derivation_from_json(const Json& j);

/// {name: relation, ...}
Json to_json(const AxiomSet& axioms);
AxiomSet axioms_from_json(const Json& j);

/// {factors: [{universe, alpha}], tuples: local index tuples}. A plain
/// relation document is read as the star relation with every factor A and
/// every alpha total.
Json to_json(const StarRelation& B);
StarRelation star_from_json(const Algebra& A, const Json& j);

}  // namespace algwb::io
