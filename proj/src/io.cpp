#include "algwb/io.hpp"

#include <fstream>
#include <sstream>

namespace algwb::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ParseError(what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) fail(std::string("expected an object with field '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing field '") + key + "'");
  return *it;
}

std::size_t as_size(const Json& j, const char* what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    fail(std::string(what) + " must be a non-negative integer");
  return j.get<std::size_t>();
}

Elem as_elem(const Json& j, const char* what) {
  const std::size_t v = as_size(j, what);
  if (v > kMaxUniverse) fail(std::string(what) + " out of range");
  return static_cast<Elem>(v);
}

std::vector<std::size_t> size_list(const Json& j, const char* what) {
  if (!j.is_array()) fail(std::string(what) + " must be an array");
  std::vector<std::size_t> out;
  for (const auto& v : j) out.push_back(as_size(v, what));
  return out;
}

// Library constructors report bad shapes with invalid_argument.
template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    fail(std::string(what) + ": " + e.what());
  } catch (const Json::exception& e) {
    fail(std::string(what) + ": " + e.what());
  }
}

}  // namespace

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(e.what());
  }
}

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const ParseError& e) {
    fail(path + ": " + e.what());
  }
}

void write_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
}

Json to_json(const Algebra& A) {
  Json ops = Json::array();
  for (const auto& op : A.ops()) ops.push_back({{"name", op.name}, {"arity", op.arity}, {"table", op.table}});
  return {{"name", A.name()}, {"size", A.size()}, {"ops", ops}};
}

Algebra algebra_from_json(const Json& j) {
  const auto& name = field(j, "name");
  if (!name.is_string()) fail("algebra name must be a string");
  const std::size_t size = as_size(field(j, "size"), "algebra size");
  const auto& ops = field(j, "ops");
  if (!ops.is_array()) fail("ops must be an array");
  std::vector<Operation> parsed;
  for (const auto& o : ops) {
    Operation op;
    const auto& n = field(o, "name");
    if (!n.is_string()) fail("operation name must be a string");
    op.name = n.get<std::string>();
    op.arity = as_size(field(o, "arity"), "operation arity");
    const auto& t = field(o, "table");
    if (!t.is_array()) fail("operation table must be an array");
    for (const auto& v : t) op.table.push_back(as_elem(v, "table entry"));
    parsed.push_back(std::move(op));
  }
  return guarded("algebra", [&] { return Algebra(name.get<std::string>(), size, std::move(parsed)); });
}

Json to_json(const Relation& R) {
  Json tuples = Json::array();
  for (std::size_t i = 0; i < R.size(); ++i) {
    const auto t = R[i];
    tuples.push_back(std::vector<Elem>(t.begin(), t.end()));
  }
  return {{"arity", R.arity()}, {"tuples", tuples}};
}

Relation relation_from_json(const Json& j) {
  const std::size_t arity = as_size(field(j, "arity"), "relation arity");
  const auto& tuples = field(j, "tuples");
  if (!tuples.is_array()) fail("tuples must be an array");
  std::vector<Elem> flat;
  for (const auto& t : tuples) {
    if (!t.is_array() || t.size() != arity) fail("tuple length differs from the arity");
    for (const auto& v : t) flat.push_back(as_elem(v, "tuple entry"));
  }
  return guarded("relation", [&] { return Relation(arity, std::move(flat)); });
}

Json to_json(const Partition& p) { return Json(p.blocks()); }

Partition partition_from_json(const Json& j) {
  if (!j.is_array()) fail("partition must be a list of blocks");
  std::vector<std::vector<Elem>> blocks;
  std::size_t n = 0;
  for (const auto& b : j) {
    if (!b.is_array() || b.empty()) fail("partition blocks must be nonempty arrays");
    std::vector<Elem> block;
    for (const auto& v : b) block.push_back(as_elem(v, "block element"));
    n += block.size();
    blocks.push_back(std::move(block));
  }
  return guarded("partition", [&] { return Partition::from_blocks(n, blocks); });
}

Partition partition_from_json(const Json& j, std::size_t size) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "0") return Partition::identity(size);
    if (s == "1") return Partition::full(size);
    fail("partition name must be \"0\" or \"1\"");
  }
  Partition p = partition_from_json(j);
  if (p.size() != size) fail("partition does not cover the universe");
  return p;
}

Json to_json(const DerivationStep& s) {
  using K = DerivationStep::Kind;
  Json j = {{"kind", kind_name(s.kind)}};
  switch (s.kind) {
    case K::Axiom: j["axiom"] = s.axiom; break;
    case K::Equality:
    case K::Full: j["arity"] = s.arity; break;
    case K::Intersect:
    case K::Product:
      j["first"] = s.first;
      j["second"] = s.second;
      break;
    case K::Permute:
      j["first"] = s.first;
      j["coordinates"] = s.coordinates;
      break;
    case K::RetractProject:
      j["first"] = s.first;
      j["coordinates"] = s.coordinates;
      if (s.retraction) j["retraction"] = to_json(*s.retraction);
      break;
  }
  return j;
}

DerivationStep step_from_json(const Json& j) {
  const auto& k = field(j, "kind");
  if (!k.is_string()) fail("step kind must be a string");
  const auto kind = k.get<std::string>();
  if (kind == "axiom") {
    const auto& a = field(j, "axiom");
    if (!a.is_string()) fail("axiom name must be a string");
    return DerivationStep::axiom_step(a.get<std::string>());
  }
  if (kind == "equality") return DerivationStep::equality(as_size(field(j, "arity"), "arity"));
  if (kind == "full") return DerivationStep::full(as_size(field(j, "arity"), "arity"));
  const std::size_t first = as_size(field(j, "first"), "step reference");
  if (kind == "intersect") return DerivationStep::intersect(first, as_size(field(j, "second"), "step reference"));
  if (kind == "product") return DerivationStep::product(first, as_size(field(j, "second"), "step reference"));
  auto coords = size_list(field(j, "coordinates"), "coordinate");
  if (kind == "permute") return DerivationStep::permute(first, std::move(coords));
  if (kind == "retract_project") {
    std::optional<Relation> retraction;
    if (j.contains("retraction")) retraction = relation_from_json(j.at("retraction"));
    return DerivationStep::retract_project(first, std::move(coords), std::move(retraction));
  }
  fail("unknown step kind '" + kind + "'");
}

Json to_json(const Derivation& d) {
  Json steps = Json::array();
  for (const auto& s : d.steps) steps.push_back(to_json(s));
  return {{"steps", steps}};
}

Derivation derivation_from_json(const Json& j) {
  const auto& steps = field(j, "steps");
  if (!steps.is_array()) fail("steps must be an array");
  Derivation d;
  for (const auto& s : steps) d.add(step_from_json(s));
  return d;
}

Json to_json(const AxiomSet& axioms) {
  Json j = Json::object();
  for (const auto& [name, rel] : axioms) j[name] = to_json(rel);
  return j;
}

AxiomSet axioms_from_json(const Json& j) {
  if (!j.is_object()) fail("axioms must be an object of named relations");
  AxiomSet out;
  for (const auto& [name, rel] : j.items()) out.emplace(name, relation_from_json(rel));
  return out;
}

Json to_json(const StarRelation& B) {
  Json factors = Json::array();
  for (const auto& f : B.factors)
    factors.push_back({{"universe", to_json(f.algebra.universe)}, {"alpha", to_json(f.alpha)}});
  Json tuples = to_json(B.local)["tuples"];
  return {{"factors", factors}, {"tuples", tuples}};
}

StarRelation star_from_json(const Algebra& A, const Json& j) {
  if (!j.is_object()) fail("relation document must be an object");
  if (!j.contains("factors")) {
    const Relation R = relation_from_json(j);
    Subpower whole = make_subpower(A, Relation::full(A.size(), 1), A.name());
    std::vector<StarFactor> factors(R.arity(), StarFactor{whole, Partition::full(A.size())});
    return guarded("star relation", [&] { return star_from_relation(std::move(factors), R); });
  }
  const auto& fs = field(j, "factors");
  if (!fs.is_array()) fail("factors must be an array");
  std::vector<StarFactor> factors;
  for (const auto& f : fs) {
    const Relation U = relation_from_json(field(f, "universe"));
    Subpower S = guarded("factor universe", [&] {
      return make_subpower(A, U, A.name() + "_F" + std::to_string(factors.size()));
    });
    Partition alpha = partition_from_json(field(f, "alpha"), S.algebra.size());
    factors.push_back(StarFactor{std::move(S), std::move(alpha)});
  }
  Json local = {{"arity", factors.size()}, {"tuples", field(j, "tuples")}};
  const Relation L = relation_from_json(local);
  return guarded("star relation", [&] { return star_from_local(std::move(factors), L); });
}

}  // namespace algwb::io
