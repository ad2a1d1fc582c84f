#include "algwb/modules.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>

#include "algwb/closure.hpp"
#include "algwb/commutator.hpp"
#include "algwb/congruence.hpp"

namespace algwb {

namespace {

Elem eval3(const Algebra& C, const Term& d, Elem x, Elem y, Elem z, std::vector<Elem>& scratch) {
  const Elem args[3] = {x, y, z};
  return d.evaluate(C, args, scratch);
}

std::string elem_text(Elem x) { return std::to_string(static_cast<unsigned>(x)); }

// Variable assignment (x, constants...) for an action term.
std::vector<Elem> action_vars(Elem x, const std::vector<Elem>& constants) {
  std::vector<Elem> v;
  v.reserve(1 + constants.size());
  v.push_back(x);
  v.insert(v.end(), constants.begin(), constants.end());
  return v;
}

}  // namespace

Elem OAssignment::value(std::size_t symbol) const {
  if (symbol >= symbols) throw std::out_of_range("constant symbol out of range");
  return symbol < values.size() ? values[symbol] : values.front();
}

bool OAssignment::represents(const Partition& alpha) const {
  std::set<Elem> seen;
  for (Elem v : values) {
    if (v >= alpha.size()) return false;
    seen.insert(alpha.rep(v));
  }
  return seen.size() == alpha.num_blocks();
}

OAssignment OAssignment::from_elements(std::span<const Elem> interpretation) {
  OAssignment O;
  O.symbols = interpretation.size();
  for (Elem v : interpretation)
    if (std::find(O.values.begin(), O.values.end(), v) == O.values.end()) O.values.push_back(v);
  return O;
}

OAssignment OAssignment::canonical(const Partition& alpha, std::size_t symbols) {
  OAssignment O;
  for (const auto& block : alpha.blocks()) O.values.push_back(block.front());
  if (symbols < O.values.size())
    throw std::invalid_argument("fewer constant symbols (" + std::to_string(symbols) + ") than classes (" +
                                std::to_string(O.values.size()) + ")");
  O.symbols = symbols;
  return O;
}

std::size_t ClassGroup::position(Elem u) const {
  if (!contains(u)) throw std::invalid_argument("element " + elem_text(u) + " outside the class");
  return static_cast<std::size_t>(position_[u]);
}

Elem ClassGroup::add(Elem u, Elem v) const { return carrier_[add_[position(u) * size() + position(v)]]; }

Elem ClassGroup::negate(Elem u) const { return carrier_[negate_[position(u)]]; }

std::size_t ClassGroup::exponent() const {
  std::size_t e = 1;
  for (Elem u : carrier_) {
    std::size_t order = 1;
    for (Elem x = u; x != zero_; x = add(x, u)) ++order;
    e = std::lcm(e, order);
  }
  return e;
}

ClassGroup class_group(const Algebra& C, const Partition& alpha, Elem o, const Term& d, const Budget& budget) {
  if (d.arity != 3) throw std::invalid_argument("d must be ternary");
  if (alpha.size() != C.size() || o >= C.size()) throw std::invalid_argument("congruence or constant does not fit");
  ClassGroup g;
  g.zero_ = o;
  g.carrier_ = alpha.block_of(o);
  const std::size_t k = g.carrier_.size();
  budget.charge(k * k * k, "class group check");
  g.position_.assign(C.size(), -1);
  for (std::size_t i = 0; i < k; ++i) g.position_[g.carrier_[i]] = static_cast<std::int32_t>(i);

  std::vector<Elem> scratch;
  auto in_class = [&](Elem x, const char* what) {
    if (!g.contains(x)) throw HypothesisError(std::string(what) + " leaves the class of " + elem_text(o));
    return static_cast<Elem>(g.position_[x]);
  };
  g.add_.resize(k * k);
  g.negate_.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j)
      g.add_[i * k + j] = in_class(eval3(C, d, g.carrier_[i], o, g.carrier_[j], scratch), "sum");
    g.negate_[i] = in_class(eval3(C, d, o, g.carrier_[i], o, scratch), "negation");
  }

  const std::size_t zero = g.position(o);
  auto fail = [&](const std::string& what) {
    throw HypothesisError("class group of " + elem_text(o) + ": " + what);
  };
  for (std::size_t a = 0; a < k; ++a) {
    if (g.add_[a * k + zero] != a) fail("zero is not neutral");
    if (g.add_[a * k + g.negate_[a]] != zero) fail("negation is not an inverse");
    for (std::size_t b = 0; b < k; ++b) {
      if (g.add_[a * k + b] != g.add_[b * k + a]) fail("addition is not commutative");
      for (std::size_t c = 0; c < k; ++c) {
        if (g.add_[g.add_[a * k + b] * k + c] != g.add_[a * k + g.add_[b * k + c]]) fail("addition is not associative");
        const Elem lhs = eval3(C, d, g.carrier_[a], g.carrier_[b], g.carrier_[c], scratch);
        const Elem rhs = g.carrier_[g.add_[g.add_[a * k + g.negate_[b]] * k + c]];
        if (lhs != rhs) fail("d(u,v,w) differs from u - v + w");
      }
    }
  }
  return g;
}

Elem sum_via_d(const Algebra& C, const ClassGroup& group, const Term& d, std::span<const Elem> us, std::size_t e) {
  if (e == 0 || us.size() != e + 1) throw std::invalid_argument("sum_via_d needs e + 1 elements with e >= 1");
  for (Elem u : us)
    if (!group.contains(u)) throw std::invalid_argument("element " + elem_text(u) + " outside the class");
  if (e % group.exponent() != 0) throw std::invalid_argument("multiplier is not a multiple of the group exponent");
  std::vector<Elem> scratch;
  const Elem last = us[e];
  Elem nested = us[0];
  for (std::size_t i = 1; i < e; ++i) nested = eval3(C, d, nested, last, us[i], scratch);
  Elem sum = group.zero();
  for (Elem u : us) sum = group.add(sum, u);
  if (nested != sum) throw HypothesisError("nested d-expression differs from the group sum");
  return nested;
}

std::optional<std::size_t> GroupFamily::group_of_zero(Elem o) const {
  for (std::size_t i = 0; i < groups.size(); ++i)
    if (groups[i].zero() == o) return i;
  return std::nullopt;
}

std::optional<std::size_t> GroupFamily::group_containing(Elem u) const {
  for (std::size_t i = 0; i < groups.size(); ++i)
    if (groups[i].contains(u)) return i;
  return std::nullopt;
}

Elem GroupFamily::apply(const UnaryAction& r, Elem u) const { return r.map[groups[r.source].position(u)]; }

std::vector<UnaryAction> unary_actions(const Algebra& C, const Partition& alpha, const OAssignment& O,
                                       const std::vector<ClassGroup>& groups, const Budget& budget) {
  const std::size_t n = C.size();
  const std::size_t m = O.values.size();
  // generator 0 is the identity map, generator 1 + j the constant values[j]
  std::vector<Elem> gens;
  gens.reserve((1 + m) * n);
  for (std::size_t x = 0; x < n; ++x) gens.push_back(static_cast<Elem>(x));
  for (Elem v : O.values) gens.insert(gens.end(), n, v);
  ClosureOptions opts;
  opts.budget = budget;
  opts.record_provenance = true;
  const ClosureResult clone = close_subpower(C, n, gens, opts);

  std::map<Elem, std::size_t> group_by_zero;
  for (std::size_t g = 0; g < groups.size(); ++g) group_by_zero.emplace(groups[g].zero(), g);
  std::vector<UnaryAction> out;
  std::set<std::tuple<std::size_t, std::size_t, std::vector<Elem>>> seen;
  for (std::size_t f = 0; f < clone.tuples.size(); ++f) {
    const auto fun = clone.tuples[f];
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto it = group_by_zero.find(fun[groups[g].zero()]);
      if (it == group_by_zero.end()) continue;
      UnaryAction r;
      r.source = g;
      r.target = it->second;
      for (Elem u : groups[g].carrier()) {
        r.map.push_back(fun[u]);
        if (!alpha.related(fun[u], groups[r.target].zero()))
          throw HypothesisError("unary O-term does not preserve the congruence");
      }
      if (!seen.emplace(r.source, r.target, r.map).second) continue;
      r.term = Term::from_provenance(clone, f, 1 + m);
      out.push_back(std::move(r));
    }
  }
  return out;
}

GroupFamily build_family(const Algebra& C, const Partition& alpha, const OAssignment& O, const Term& d,
                         const Budget& budget) {
  if (O.values.empty()) throw std::invalid_argument("no constants");
  if (alpha.size() != C.size() || !is_congruence(C, alpha)) throw HypothesisError("alpha is not a congruence");
  for (Elem v : O.values)
    if (v >= C.size()) throw std::invalid_argument("constant outside the universe");
  if (!commutator(C, alpha, alpha, budget).is_identity()) throw HypothesisError("alpha is not abelian");
  const DifferenceCheck dc = check_difference_term(d, {C, alpha}, budget);
  if (!dc.ok) throw HypothesisError("not a difference term for alpha: " + dc.failure);

  GroupFamily F;
  F.algebra = C;
  F.alpha = alpha;
  F.constants = O;
  F.d = d;
  for (Elem v : O.values) F.groups.push_back(class_group(C, alpha, v, d, budget));
  F.actions = unary_actions(C, alpha, O, F.groups, budget);
  for (const UnaryAction& r : F.actions) {
    const ClassGroup& src = F.groups[r.source];
    const ClassGroup& tgt = F.groups[r.target];
    for (Elem u : src.carrier())
      for (Elem v : src.carrier())
        if (F.apply(r, src.add(u, v)) != tgt.add(F.apply(r, u), F.apply(r, v)))
          throw HypothesisError("unary action is not additive");
  }
  return F;
}

DecompositionReport term_decomposition_check(const GroupFamily& F, const Term& t,
                                             std::span<const std::size_t> argument_groups, const Budget& budget) {
  const std::size_t k = argument_groups.size();
  const std::vector<Elem>& consts = F.constants.values;
  if (t.arity != k + consts.size()) throw std::invalid_argument("term arity does not match arguments and constants");
  for (std::size_t g : argument_groups)
    if (g >= F.groups.size()) throw std::invalid_argument("argument group out of range");

  DecompositionReport rep;
  std::vector<Elem> scratch;
  std::vector<Elem> vars(t.arity);
  std::copy(consts.begin(), consts.end(), vars.begin() + static_cast<std::ptrdiff_t>(k));
  for (std::size_t i = 0; i < k; ++i) vars[i] = F.groups[argument_groups[i]].zero();
  const Elem a = t.evaluate(F.algebra, vars, scratch);
  rep.constant_part = a;
  rep.target = F.group_containing(a);
  if (!rep.target) {
    rep.failure = "no constant in the class of t(o)";
    return rep;
  }
  const ClassGroup& out = F.groups[*rep.target];

  std::vector<std::vector<Elem>> parts(k);
  for (std::size_t i = 0; i < k; ++i) {
    const ClassGroup& src = F.groups[argument_groups[i]];
    std::vector<Elem> map;
    auto v = vars;
    for (Elem u : src.carrier()) {
      v[i] = u;
      map.push_back(eval3(F.algebra, F.d, t.evaluate(F.algebra, v, scratch), a, out.zero(), scratch));
    }
    for (std::size_t r = 0; r < F.actions.size(); ++r) {
      const UnaryAction& act = F.actions[r];
      if (act.source == argument_groups[i] && act.target == *rep.target && act.map == map) {
        rep.actions.push_back(r);
        break;
      }
    }
    if (rep.actions.size() != i + 1) {
      rep.actions.push_back(std::nullopt);
      rep.failure = "argument " + std::to_string(i) + " has no matching action";
    }
    parts[i] = std::move(map);
  }

  // every tuple of the product of the argument classes
  std::vector<std::size_t> pos(k, 0);
  std::size_t total = 1;
  for (std::size_t g : argument_groups) {
    total *= F.groups[g].size();
    budget.charge(total, "decomposition check");
  }
  for (std::size_t step = 0; step < total; ++step) {
    Elem rhs = a;
    for (std::size_t i = 0; i < k; ++i) {
      vars[i] = F.groups[argument_groups[i]].carrier()[pos[i]];
      rhs = out.add(parts[i][pos[i]], rhs);
    }
    const Elem lhs = t.evaluate(F.algebra, vars, scratch);
    ++rep.tuples_checked;
    if (lhs != rhs) {
      rep.failure = "decomposition differs at tuple " + std::to_string(step);
      return rep;
    }
    for (std::size_t i = k; i > 0; --i) {
      if (++pos[i - 1] < F.groups[argument_groups[i - 1]].size()) break;
      pos[i - 1] = 0;
    }
  }
  rep.ok = rep.failure.empty();
  return rep;
}

bool SubFamily::leq(const SubFamily& other) const {
  if (members.size() != other.members.size()) return false;
  for (std::size_t g = 0; g < members.size(); ++g)
    if (!std::includes(other.members[g].begin(), other.members[g].end(), members[g].begin(), members[g].end()))
      return false;
  return true;
}

SubFamily empty_family(const GroupFamily& F) { return SubFamily{std::vector<std::vector<Elem>>(F.groups.size())}; }

SubFamily full_family(const GroupFamily& F) {
  SubFamily s;
  for (const auto& g : F.groups) s.members.push_back(g.carrier());
  return s;
}

SubFamily family_of(const GroupFamily& F, const Relation& subuniverse) {
  if (subuniverse.arity() != 1) throw std::invalid_argument("subuniverse must be unary");
  SubFamily s = empty_family(F);
  for (std::size_t g = 0; g < F.groups.size(); ++g)
    for (Elem u : F.groups[g].carrier())
      if (subuniverse.contains(std::span<const Elem>(&u, 1))) s.members[g].push_back(u);
  return s;
}

SubFamily least_subalgebra_family(const GroupFamily& F, const Budget& budget) {
  return family_of(F, generate_subuniverse(F.algebra, 1, F.constants.values, budget));
}

SubFamily family_closure(const GroupFamily& F, const SubFamily& seed, const Budget& budget) {
  const std::size_t groups = F.groups.size();
  if (seed.members.size() != groups) throw std::invalid_argument("seed has the wrong number of groups");
  std::vector<std::vector<char>> in(groups);
  std::vector<std::vector<Elem>> list(groups);
  for (std::size_t g = 0; g < groups; ++g) in[g].assign(F.groups[g].size(), 0);
  auto insert = [&](std::size_t g, Elem u) {
    const std::size_t p = F.groups[g].position(u);
    if (in[g][p]) return false;
    in[g][p] = 1;
    list[g].push_back(u);
    return true;
  };
  for (std::size_t g = 0; g < groups; ++g)
    for (Elem u : seed.members[g])
      if (!F.groups[g].contains(u)) throw std::invalid_argument("seed element outside its class");
  const SubFamily least = least_subalgebra_family(F, budget);
  for (std::size_t g = 0; g < groups; ++g) {
    for (Elem u : seed.members[g]) insert(g, u);
    for (Elem u : least.members[g]) insert(g, u);
    insert(g, F.groups[g].zero());
  }

  std::size_t work = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t g = 0; g < groups; ++g) {
      const ClassGroup& G = F.groups[g];
      for (std::size_t i = 0; i < list[g].size(); ++i) {
        changed |= insert(g, G.negate(list[g][i]));
        for (std::size_t j = 0; j <= i; ++j) changed |= insert(g, G.add(list[g][i], list[g][j]));
        budget.charge(work += i + 1, "family closure");
      }
    }
    for (const UnaryAction& r : F.actions) {
      const std::size_t count = list[r.source].size();
      for (std::size_t i = 0; i < count; ++i) changed |= insert(r.target, F.apply(r, list[r.source][i]));
      budget.charge(work += count, "family closure");
    }
    for (std::size_t g = 0; g < groups; ++g)
      for (std::size_t h = 0; h < groups; ++h)
        if (g != h && F.alpha.related(F.groups[g].zero(), F.groups[h].zero()))
          for (std::size_t i = 0; i < list[g].size(); ++i) changed |= insert(h, list[g][i]);
  }
  SubFamily out;
  for (auto& l : list) {
    std::sort(l.begin(), l.end());
    out.members.push_back(std::move(l));
  }
  return out;
}

BijectionReport subalgebra_submodule_bijection(const GroupFamily& F, const Budget& budget) {
  if (!F.constants.represents(F.alpha)) throw HypothesisError("constants do not represent every class");
  const Algebra& C = F.algebra;
  const Relation least = generate_subuniverse(C, 1, F.constants.values, budget);
  const std::vector<Relation> subs = subuniverses_between(C, least, Relation::full(C.size(), 1), budget);

  // closed families: breadth-first from the least one, adding one element at a time
  std::set<SubFamily> families;
  std::vector<SubFamily> queue{family_closure(F, empty_family(F), budget)};
  families.insert(queue.front());
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const SubFamily cur = queue[q];
    for (std::size_t g = 0; g < F.groups.size(); ++g)
      for (Elem u : F.groups[g].carrier()) {
        if (std::binary_search(cur.members[g].begin(), cur.members[g].end(), u)) continue;
        SubFamily seed = cur;
        seed.members[g].insert(std::upper_bound(seed.members[g].begin(), seed.members[g].end(), u), u);
        SubFamily next = family_closure(F, seed, budget);
        if (families.insert(next).second) queue.push_back(std::move(next));
        budget.charge(families.size(), "closed families");
      }
  }

  BijectionReport rep;
  rep.subalgebras = subs.size();
  rep.families = families.size();
  std::vector<SubFamily> image;
  rep.images_closed = true;
  for (const Relation& U : subs) {
    image.push_back(family_of(F, U));
    if (!families.count(image.back())) rep.images_closed = false;
  }
  const std::set<SubFamily> distinct(image.begin(), image.end());
  rep.injective = distinct.size() == image.size();
  rep.surjective = distinct == families;
  rep.preserves_order = rep.reflects_order = true;
  for (std::size_t i = 0; i < subs.size(); ++i)
    for (std::size_t j = 0; j < subs.size(); ++j) {
      const bool below = subs[i].subset_of(subs[j]);
      const bool image_below = image[i].leq(image[j]);
      if (below && !image_below) rep.preserves_order = false;
      if (image_below && !below) rep.reflects_order = false;
    }
  return rep;
}

Algebra product_subalgebra(std::span<const Algebra> factors, const Relation& C, const Budget& budget) {
  if (factors.empty() || C.arity() != factors.size()) throw std::invalid_argument("one factor per coordinate needed");
  if (C.empty()) throw std::invalid_argument("empty relation");
  for (const Algebra& B : factors)
    if (!B.same_signature(factors.front())) throw std::invalid_argument("factors differ in signature");
  for (std::size_t i = 0; i < C.size(); ++i)
    for (std::size_t c = 0; c < C.arity(); ++c)
      if (C[i][c] >= factors[c].size()) throw std::invalid_argument("tuple entry outside its factor");
  const std::size_t n = C.size();
  const std::size_t width = C.arity();
  std::vector<Operation> ops;
  std::vector<Elem> column, t(width);
  for (std::size_t o = 0; o < factors.front().num_ops(); ++o) {
    const std::size_t ar = factors.front().op(o).arity;
    Operation op{factors.front().op(o).name, ar, {}};
    const std::size_t rows = checked_power(n, ar);
    budget.charge(rows, "product subalgebra table");
    op.table.resize(rows);
    std::vector<std::size_t> args(ar, 0);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        column.resize(ar);
        for (std::size_t a = 0; a < ar; ++a) column[a] = C[args[a]][c];
        t[c] = factors[c].apply(o, column);
      }
      const auto idx = C.index_of(t);
      if (!idx) throw HypothesisError("relation is not closed under " + op.name);
      op.table[r] = static_cast<Elem>(*idx);
      for (std::size_t a = ar; a > 0; --a) {
        if (++args[a - 1] < n) break;
        args[a - 1] = 0;
      }
    }
    ops.push_back(std::move(op));
  }
  return Algebra("subproduct", n, std::move(ops));
}

RegroupReport regroup_iso(std::span<const Algebra> factors, std::span<const Partition> alphas, const Relation& C,
                          std::span<const std::size_t> constants, const Term& d, const Budget& budget) {
  const std::size_t width = factors.size();
  if (alphas.size() != width) throw std::invalid_argument("one congruence per factor needed");
  for (std::size_t c = 0; c < width; ++c)
    if (!saturates(C, c, alphas[c])) throw HypothesisError("relation is not saturated at coordinate " + std::to_string(c));
  const Algebra CA = product_subalgebra(factors, C, budget);
  std::vector<std::size_t> label(C.size());
  {
    std::map<std::vector<Elem>, std::size_t> ids;
    for (std::size_t i = 0; i < C.size(); ++i) {
      std::vector<Elem> key(width);
      for (std::size_t c = 0; c < width; ++c) key[c] = alphas[c].rep(C[i][c]);
      label[i] = ids.emplace(std::move(key), ids.size()).first->second;
    }
  }
  const Partition alpha_c = Partition::from_labels(std::span<const std::size_t>(label));
  std::vector<Elem> const_elems;
  for (std::size_t i : constants) {
    if (i >= C.size()) throw std::invalid_argument("constant index outside the relation");
    const_elems.push_back(static_cast<Elem>(i));
  }
  const OAssignment O = OAssignment::from_elements(const_elems);
  const GroupFamily FC = build_family(CA, alpha_c, O, d, budget);
  std::vector<GroupFamily> FB;
  for (std::size_t c = 0; c < width; ++c) {
    std::vector<Elem> vals;
    for (Elem v : O.values) vals.push_back(C[v][c]);
    FB.push_back(build_family(factors[c], alphas[c], OAssignment::from_elements(vals), d, budget));
  }

  RegroupReport rep;
  rep.classes_match = rep.bijective = rep.additive = rep.equivariant = true;
  auto fail = [&](bool& flag, const std::string& why) {
    flag = false;
    if (rep.failure.empty()) rep.failure = why;
  };
  for (std::size_t g = 0; g < FC.groups.size(); ++g) {
    const ClassGroup& G = FC.groups[g];
    const auto zero = C[G.zero()];
    std::vector<const ClassGroup*> parts;
    std::size_t product = 1;
    for (std::size_t c = 0; c < width; ++c) {
      parts.push_back(&FB[c].groups[*FB[c].group_of_zero(zero[c])]);
      product *= parts.back()->size();
    }
    std::set<std::vector<Elem>> images;
    for (Elem u : G.carrier()) {
      const auto tu = C[u];
      for (std::size_t c = 0; c < width; ++c)
        if (!parts[c]->contains(tu[c])) fail(rep.classes_match, "class element leaves a factor class");
      images.emplace(tu.begin(), tu.end());
    }
    if (product != G.size()) fail(rep.classes_match, "class is not the product of the factor classes");
    if (images.size() != G.size() || images.size() != product) fail(rep.bijective, "regrouping is not bijective");
    if (!rep.classes_match) continue;
    for (Elem u : G.carrier())
      for (Elem v : G.carrier()) {
        const auto s = C[G.add(u, v)];
        for (std::size_t c = 0; c < width; ++c)
          if (s[c] != parts[c]->add(C[u][c], C[v][c])) fail(rep.additive, "sum differs in a coordinate");
      }
  }

  std::vector<Elem> scratch;
  for (const UnaryAction& r : FC.actions) {
    ++rep.actions_checked;
    for (Elem u : FC.groups[r.source].carrier()) {
      const auto image = C[FC.apply(r, u)];
      for (std::size_t c = 0; c < width; ++c) {
        std::vector<Elem> fc;
        for (Elem v : O.values) fc.push_back(C[v][c]);
        const auto vars = action_vars(C[u][c], fc);
        if (r.term.evaluate(factors[c], vars, scratch) != image[c])
          fail(rep.equivariant, "action differs from its coordinate action");
      }
    }
  }
  return rep;
}

}  // namespace algwb
