#include "algwb/reduction.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>

#include "algwb/closure.hpp"
#include "algwb/congruence.hpp"
#include "algwb/homomorphism.hpp"
#include "algwb/modules.hpp"

namespace algwb {

namespace {

std::vector<std::size_t> iota_vector(std::size_t from, std::size_t to) {
  std::vector<std::size_t> v(to - from);
  std::iota(v.begin(), v.end(), from);
  return v;
}

// Calls f on every tuple of the product of the lists; nothing when some list is empty.
template <class F>
void for_each_product(const std::vector<const std::vector<Elem>*>& lists, const Budget& budget, std::size_t& count,
                      F&& f) {
  const std::size_t n = lists.size();
  for (const auto* l : lists)
    if (l->empty()) return;
  std::vector<std::size_t> pos(n, 0);
  std::vector<Elem> t(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) t[i] = (*lists[i])[pos[i]];
    budget.charge(++count, "product enumeration");
    f(std::span<const Elem>(t));
    std::size_t i = n;
    while (i > 0 && ++pos[i - 1] == lists[i - 1]->size()) pos[--i] = 0;
    if (i == 0) return;
  }
}

// Local tuples expanded by the blocks of a partition in every coordinate.
Relation saturate(const Relation& local, const std::vector<Partition>& parts, const Budget& budget) {
  const std::size_t n = local.arity();
  std::vector<std::vector<std::vector<Elem>>> blocks(n);
  for (std::size_t i = 0; i < n; ++i) {
    blocks[i].resize(parts[i].size());
    for (const auto& b : parts[i].blocks())
      for (Elem x : b) blocks[i][x] = b;
  }
  std::set<std::vector<Elem>> seen;
  std::size_t count = 0;
  for (std::size_t r = 0; r < local.size(); ++r) {
    std::vector<const std::vector<Elem>*> lists;
    for (std::size_t i = 0; i < n; ++i) lists.push_back(&blocks[i][local[r][i]]);
    for_each_product(lists, budget, count, [&](std::span<const Elem> t) { seen.emplace(t.begin(), t.end()); });
  }
  std::vector<Elem> flat;
  flat.reserve(seen.size() * n);
  for (const auto& t : seen) flat.insert(flat.end(), t.begin(), t.end());
  return Relation(n, std::move(flat));
}

// Raw tuple over A from local factor indices.
void append_raw(std::vector<Elem>& out, std::span<const Elem> local, const std::vector<const Subpower*>& factors) {
  for (std::size_t i = 0; i < local.size(); ++i) {
    const auto g = factors[i]->global(local[i]);
    out.insert(out.end(), g.begin(), g.end());
  }
}

Relation to_raw(const Relation& local, const std::vector<const Subpower*>& factors) {
  std::size_t arity = 0;
  for (const auto* f : factors) arity += f->power();
  std::vector<Elem> flat;
  flat.reserve(local.size() * arity);
  for (std::size_t r = 0; r < local.size(); ++r) append_raw(flat, local[r], factors);
  return Relation(arity, std::move(flat));
}

std::vector<const Subpower*> factor_algebras(const std::vector<StarFactor>& factors) {
  std::vector<const Subpower*> v;
  for (const auto& f : factors) v.push_back(&f.algebra);
  return v;
}

std::vector<Partition> factor_alphas(const std::vector<StarFactor>& factors) {
  std::vector<Partition> v;
  for (const auto& f : factors) v.push_back(f.alpha);
  return v;
}

std::uint64_t saturating_power(std::uint64_t base, std::size_t exp) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
    r *= base;
  }
  return r;
}

StarRelation permute_star(const StarRelation& B, const std::vector<std::size_t>& perm) {
  std::vector<StarFactor> factors;
  for (std::size_t j : perm) factors.push_back(B.factors[j]);
  return star_from_local(std::move(factors), B.local.permute(perm));
}

std::vector<Elem> alpha_labels(const std::vector<StarFactor>& factors, std::span<const Elem> t) {
  std::vector<Elem> l(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) l[i] = factors[i].alpha.rep(t[i]);
  return l;
}

}  // namespace

// ---------------------------------------------------------------- star relations

std::vector<std::size_t> StarRelation::offsets() const {
  std::vector<std::size_t> off;
  std::size_t acc = 0;
  for (const auto& f : factors) {
    off.push_back(acc);
    acc += f.algebra.power();
  }
  return off;
}

std::vector<std::size_t> StarRelation::alpha_classes() const {
  std::map<std::vector<Elem>, std::size_t> index;
  std::vector<std::size_t> cls(local.size());
  for (std::size_t r = 0; r < local.size(); ++r)
    cls[r] = index.emplace(alpha_labels(factors, local[r]), index.size()).first->second;
  return cls;
}

std::size_t StarRelation::alpha_index() const {
  const auto cls = alpha_classes();
  return cls.empty() ? 0 : *std::max_element(cls.begin(), cls.end()) + 1;
}

std::vector<std::size_t> StarRelation::class_representatives() const {
  const auto cls = alpha_classes();
  std::vector<std::size_t> reps;
  for (std::size_t r = 0; r < cls.size(); ++r)
    if (cls[r] == reps.size()) reps.push_back(r);
  return reps;
}

StarRelation star_from_local(std::vector<StarFactor> factors, const Relation& local) {
  if (local.arity() != factors.size()) throw std::invalid_argument("local relation arity differs from factor count");
  for (std::size_t r = 0; r < local.size(); ++r)
    for (std::size_t i = 0; i < factors.size(); ++i)
      if (local[r][i] >= factors[i].algebra.algebra.size())
        throw std::invalid_argument("local entry outside factor " + std::to_string(i));
  StarRelation S;
  S.relation = to_raw(local, factor_algebras(factors));
  S.local = local;
  S.factors = std::move(factors);
  return S;
}

StarRelation star_from_relation(std::vector<StarFactor> factors, const Relation& raw) {
  std::size_t arity = 0;
  for (const auto& f : factors) arity += f.algebra.power();
  if (raw.arity() != arity) throw std::invalid_argument("relation arity differs from the factor powers");
  std::vector<Elem> flat;
  for (std::size_t r = 0; r < raw.size(); ++r) {
    std::size_t off = 0;
    for (const auto& f : factors) {
      flat.push_back(static_cast<Elem>(f.algebra.local(raw[r].subspan(off, f.algebra.power()))));
      off += f.algebra.power();
    }
  }
  StarRelation S;
  S.local = Relation(factors.size(), std::move(flat));
  S.relation = raw;
  S.factors = std::move(factors);
  return S;
}

std::optional<SectionWitness> find_section(const Algebra& A, const Algebra& B, const Budget& budget) {
  for (const auto& U : subalgebras(A, budget)) {
    if (U.size() < B.size()) continue;
    const auto S = make_subalgebra(A, U.flat());
    const auto L = CongruenceLattice::compute(S.algebra, budget);
    for (const auto& theta : L.elements()) {
      if (theta.num_blocks() != B.size()) continue;
      const auto q = quotient(S.algebra, theta);
      if (auto iso = isomorphism(B, q.algebra, budget)) return SectionWitness{U, theta, *iso};
    }
  }
  return std::nullopt;
}

StarCheck star_check(const Algebra& A, const StarRelation& B, const StarBounds& bounds, const Budget& budget) {
  StarCheck c;
  c.powers_ok = c.sections_ok = c.alphas_ok = true;
  std::map<Relation, std::optional<SectionWitness>> sections;
  for (std::size_t i = 0; i < B.star_arity(); ++i) {
    const auto& f = B.factors[i];
    const std::string at = "factor " + std::to_string(i);
    if (f.algebra.power() > bounds.max_power || f.algebra.power() == 0) {
      c.powers_ok = false;
      c.violations.push_back("power: " + at + " has power " + std::to_string(f.algebra.power()));
    }
    auto it = sections.find(f.algebra.universe);
    if (it == sections.end()) it = sections.emplace(f.algebra.universe, find_section(A, f.algebra.algebra, budget)).first;
    c.sections.push_back(it->second);
    if (!it->second) {
      c.sections_ok = false;
      c.violations.push_back("section: " + at + " is not isomorphic to a section");
    }
    const Algebra& F = f.algebra.algebra;
    if (f.alpha.size() != F.size() || !is_congruence(F, f.alpha)) {
      c.alphas_ok = false;
      c.violations.push_back("alpha: " + at + " alpha is not a congruence");
    } else if (f.alpha.is_identity()) {
      c.alphas_ok = false;
      c.violations.push_back("alpha: " + at + " alpha is trivial");
    } else if (!commutator(F, f.alpha, f.alpha, budget).is_identity()) {
      c.alphas_ok = false;
      c.violations.push_back("alpha: " + at + " alpha is not abelian");
    }
  }
  c.subdirect = !B.relation.empty() && is_compatible(A, B.relation, budget);
  if (!c.subdirect) c.violations.push_back("subdirect: relation is not compatible");
  for (std::size_t i = 0; c.subdirect && i < B.star_arity(); ++i)
    if (B.local.coordinate_values(i).size() != B.factors[i].algebra.algebra.size()) {
      c.subdirect = false;
      c.violations.push_back("(III) projection onto factor " + std::to_string(i) + " is not onto");
    }
  c.index = B.alpha_index();
  c.index_ok = !bounds.max_index || c.index <= *bounds.max_index;
  if (!c.index_ok) c.violations.push_back("index: index " + std::to_string(c.index) + " exceeds the bound");
  return c;
}

// ---------------------------------------------------------------- critical relations

ReductionResult build_reduction(const Algebra& A, const Relation& C, const TermWitness& parallelogram,
                                const ReductionOptions& options) {
  const Budget& budget = options.budget;
  const std::size_t n = C.arity();
  const std::size_t min_arity = std::max<std::size_t>(3, parallelogram.k);
  if (n < min_arity)
    throw HypothesisError("relation arity " + std::to_string(n) + " is below max(3, k) = " + std::to_string(min_arity));
  const CmGuard guard = cm_guard(parallelogram);
  if (!is_critical(A, C, budget).critical()) throw HypothesisError("relation is not critical");

  ReductionResult r;
  r.input = C;
  r.rep = reduced_representation(A, C, guard, budget);
  if (!r.rep.all_relevant()) throw HypothesisError("some coordinate has no abelian relevant triple");
  const auto& F = r.rep.factors;

  r.triple_class.resize(n);
  r.coordinate_class.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t a = i, s = i;
    for (std::size_t j = i; j-- > 0;) {
      if (F[j] == F[i]) a = j;
      if (r.rep.same_coordinate_class(j, i)) s = j;
    }
    r.triple_class[i] = a;
    r.coordinate_class[i] = s;
    if (a == i) r.triple_transversal.push_back(i);
    if (s == i) r.transversal.push_back(i);
  }

  if (options.splits && options.splits->size() != n) throw std::invalid_argument("one splitting triple per coordinate");
  std::vector<std::optional<SplittingTriple>> chosen(n);
  for (std::size_t t : r.triple_transversal) {
    const RelevantTriple triple{F[t].delta, F[t].theta, F[t].nu};
    if (options.splits) {
      const auto& s = (*options.splits)[t];
      if (!verify_splitting(A, F[t].table, triple, s).all())
        throw HypothesisError("supplied triple does not split coordinate " + std::to_string(t));
      chosen[t] = s;
    } else {
      chosen[t] = find_splitting_triple(A, F[t].table, triple, guard, budget);
    }
    if (!chosen[t])
      throw HypothesisError("coordinate " + std::to_string(t) + ": relevant triple " + F[t].table[F[t].delta].to_string() +
                            " " + F[t].table[F[t].theta].to_string() + " " + F[t].table[F[t].nu].to_string() +
                            " has no splitting triple");
  }
  for (std::size_t i = 0; i < n; ++i) r.splits.push_back(*chosen[r.triple_class[i]]);

  std::vector<Partition> alpha, beta, kappa;
  for (std::size_t i = 0; i < n; ++i) {
    alpha.push_back(F[i].table[r.splits[i].alpha]);
    beta.push_back(F[i].table[r.splits[i].beta]);
    kappa.push_back(F[i].table[r.splits[i].kappa]);
  }

  {
    std::vector<Elem> flat;
    for (std::size_t t = 0; t < r.rep.local.size(); ++t) {
      const auto d = r.rep.local[t];
      bool keep = true;
      for (std::size_t i = 0; keep && i < n; ++i)
        for (std::size_t j = i + 1; keep && j < n; ++j)
          if (r.coordinate_class[i] == r.coordinate_class[j] && !alpha[j].related(d[i], d[j])) keep = false;
      if (keep) flat.insert(flat.end(), d.begin(), d.end());
    }
    r.lifted = Relation(n, std::move(flat));
  }

  // phi_i and B_i, shared across each approx class.
  std::vector<StarFactor> factors(n);
  r.factor_maps.resize(n);
  r.embeddings.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = r.triple_class[i];
    if (a != i) {
      factors[i] = factors[a];
      r.factor_maps[i] = r.factor_maps[a];
      r.embeddings[i] = r.embeddings[a];
      continue;
    }
    const auto& emb = r.splits[i].embedding;
    const std::size_t m = F[i].algebra.algebra.size();
    const std::size_t p = emb.power();
    if (p == 0) throw std::logic_error("splitting embedding of coordinate " + std::to_string(i) + " has no maps");
    std::vector<Elem> flat;
    for (std::size_t x = 0; x < m; ++x) {
      const auto t = emb.tuple(static_cast<Elem>(x));
      flat.insert(flat.end(), t.begin(), t.end());
    }
    const Relation image(p, flat);
    Subpower Bi = make_subpower(A, image, A.name() + "_B" + std::to_string(i), budget);
    std::vector<std::size_t> ph(m);
    std::vector<Elem> labels(Bi.algebra.size(), 0);
    for (std::size_t x = 0; x < m; ++x) {
      ph[x] = Bi.local(std::span<const Elem>(flat.data() + x * p, p));
      labels[ph[x]] = alpha[i].rep(x);
    }
    factors[i] = StarFactor{std::move(Bi), Partition::from_labels(std::span<const Elem>(labels))};
    r.factor_maps[i] = std::move(ph);
    r.embeddings[i] = emb;
  }

  {
    std::vector<Elem> flat;
    for (std::size_t t = 0; t < r.lifted.size(); ++t)
      for (std::size_t i = 0; i < n; ++i) flat.push_back(static_cast<Elem>(r.factor_maps[i][r.lifted[t][i]]));
    r.star = star_from_local(factors, Relation(n, std::move(flat)));
  }

  const auto offsets = r.star.offsets();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& Ai = F[i].algebra;
    const auto& Bi = factors[i].algebra;
    const std::size_t p = Bi.power();
    std::vector<Elem> graph, comp;
    for (std::size_t x = 0; x < Ai.algebra.size(); ++x) {
      graph.push_back(Ai.global(x)[0]);
      const auto img = Bi.global(r.factor_maps[i][x]);
      graph.insert(graph.end(), img.begin(), img.end());
      for (Elem z : beta[i].block_of(x)) {
        comp.push_back(Ai.global(x)[0]);
        const auto bz = Bi.global(r.factor_maps[i][z]);
        comp.insert(comp.end(), bz.begin(), bz.end());
      }
    }
    r.factor_map_graphs.emplace_back(1 + p, std::move(graph));
    r.beta_map_graphs.emplace_back(1 + p, std::move(comp));
  }

  // X: (c, b) with b in B, (c_i, b_i) in beta_i o phi_i, b_t = phi_t(c_t) on the transversal.
  {
    std::vector<char> in_t(n, 0);
    for (std::size_t t : r.transversal) in_t[t] = 1;
    std::vector<std::vector<std::vector<Elem>>> cand(n);
    for (std::size_t i = 0; i < n; ++i) {
      cand[i].resize(factors[i].algebra.algebra.size());
      for (std::size_t x = 0; x < F[i].algebra.algebra.size(); ++x)
        for (Elem z : beta[i].block_of(x)) {
          const std::size_t b = r.factor_maps[i][z];
          if (in_t[i] && r.factor_maps[i][x] != b) continue;
          auto& l = cand[i][b];
          if (l.empty() || l.back() != x) l.push_back(static_cast<Elem>(x));
        }
    }
    std::size_t width = n + r.star.relation.arity();
    std::vector<Elem> flat;
    std::size_t count = 0;
    const auto sub = factor_algebras(factors);
    for (std::size_t t = 0; t < r.star.local.size(); ++t) {
      const auto b = r.star.local[t];
      std::vector<const std::vector<Elem>*> lists;
      for (std::size_t i = 0; i < n; ++i) lists.push_back(&cand[i][b[i]]);
      for_each_product(lists, budget, count, [&](std::span<const Elem> c) {
        for (std::size_t i = 0; i < n; ++i) flat.push_back(F[i].algebra.global(c[i])[0]);
        append_raw(flat, b, sub);
      });
    }
    r.witness = Relation(width, std::move(flat));

    Derivation& der = r.derivation;
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string tag = std::to_string(i);
      const std::size_t p = factors[i].algebra.power();
      std::vector<std::size_t> block = iota_vector(n + offsets[i], n + offsets[i] + p);
      std::vector<std::size_t> with_c{i};
      with_c.insert(with_c.end(), block.begin(), block.end());
      r.axioms["A_" + tag] = F[i].algebra.universe;
      r.axioms["B_" + tag] = factors[i].algebra.universe;
      r.axioms["beta_map_" + tag] = r.beta_map_graphs[i];
      atoms.push_back({"A_" + tag, {i}});
      atoms.push_back({"B_" + tag, block});
      atoms.push_back({"beta_map_" + tag, with_c});
      if (in_t[i]) {
        r.axioms["map_" + tag] = r.factor_map_graphs[i];
        atoms.push_back({"map_" + tag, with_c});
      }
    }
    r.axioms["B"] = r.star.relation;
    atoms.push_back({"B", iota_vector(n, width)});
    der = conjunction_derivation(r.axioms, width, atoms);
    der.add(DerivationStep::retract_project(der.steps.size() - 1, iota_vector(0, n)));
  }
  return r;
}

ReductionClaims verify_reduction_claims(const Algebra& A, const ReductionResult& r, std::size_t max_power,
                                 std::optional<std::uint64_t> index_bound, const Budget& budget) {
  ReductionClaims c;
  const auto& F = r.rep.factors;
  const std::size_t n = F.size();
  const Relation& Cl = r.rep.local;
  std::vector<Partition> alpha, beta, kappa;
  for (std::size_t i = 0; i < n; ++i) {
    alpha.push_back(F[i].table[r.splits[i].alpha]);
    beta.push_back(F[i].table[r.splits[i].beta]);
    kappa.push_back(F[i].table[r.splits[i].kappa]);
  }
  auto fail = [&](const std::string& what) { c.failures.push_back(what); };

  c.classwise_alpha = r.lifted.subset_of(Cl);
  for (std::size_t t = 0; c.classwise_alpha && t < r.lifted.size(); ++t)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (r.coordinate_class[i] == r.coordinate_class[j] && !alpha[j].related(r.lifted[t][i], r.lifted[t][j])) c.classwise_alpha = false;
  if (!c.classwise_alpha) fail("classwise_alpha");

  // Every transversal of the sim classes.
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < n; ++i) members[r.coordinate_class[i]].push_back(i);
  std::vector<std::vector<std::size_t>> transversals;
  {
    std::vector<std::size_t> classes = r.transversal;
    std::vector<std::size_t> pos(classes.size(), 0);
    while (true) {
      std::vector<std::size_t> T;
      for (std::size_t k = 0; k < classes.size(); ++k) T.push_back(members[classes[k]][pos[k]]);
      std::sort(T.begin(), T.end());
      transversals.push_back(std::move(T));
      budget.charge(transversals.size(), "transversals");
      std::size_t k = classes.size();
      while (k > 0 && ++pos[k - 1] == members[classes[k - 1]].size()) pos[--k] = 0;
      if (k == 0) break;
    }
  }

  c.lift_exists = c.lift_unique = true;
  for (const auto& T : transversals)
    for (std::size_t s = 0; s < Cl.size(); ++s) {
      const auto cc = Cl[s];
      std::vector<std::size_t> lifts;
      for (std::size_t t = 0; t < r.lifted.size(); ++t) {
        const auto d = r.lifted[t];
        bool ok = true;
        for (std::size_t i = 0; ok && i < n; ++i) ok = beta[i].related(d[i], cc[i]);
        for (std::size_t k = 0; ok && k < T.size(); ++k) ok = d[T[k]] == cc[T[k]];
        if (ok) lifts.push_back(t);
      }
      if (lifts.empty()) c.lift_exists = false;
      for (std::size_t t : lifts)
        for (std::size_t i = 0; i < n; ++i)
          if (!kappa[i].related(r.lifted[t][i], r.lifted[lifts.front()][i])) c.lift_unique = false;
    }
  if (!c.lift_exists) fail("lift existence");
  if (!c.lift_unique) fail("lift uniqueness modulo kappa");

  std::vector<const Subpower*> coord;
  for (const auto& f : F) coord.push_back(&f.algebra);
  c.d_subdirect = !r.lifted.empty();
  for (std::size_t i = 0; c.d_subdirect && i < n; ++i)
    c.d_subdirect = r.lifted.coordinate_values(i).size() == F[i].algebra.algebra.size();
  if (!c.d_subdirect) fail("lifted subdirect");
  c.d_compatible = !r.lifted.empty() && is_compatible(A, to_raw(r.lifted, coord), budget);
  if (!c.d_compatible) fail("lifted compatible");

  c.transversal_projection = true;
  const std::size_t t_size = r.transversal.size();
  c.transversal_bound = saturating_power(A.size(), t_size);
  c.d_alpha_index = 0;
  {
    std::set<std::vector<Elem>> classes;
    for (std::size_t t = 0; t < r.lifted.size(); ++t) {
      std::vector<Elem> l(n);
      for (std::size_t i = 0; i < n; ++i) l[i] = alpha[i].rep(r.lifted[t][i]);
      classes.insert(l);
    }
    c.d_alpha_index = classes.size();
  }
  c.index_bounds = true;
  for (const auto& T : transversals) {
    const Relation pd = r.lifted.project(T);
    if (!(pd == Cl.project(T))) c.transversal_projection = false;
    c.transversal_image = std::max(c.transversal_image, pd.size());
    if (c.d_alpha_index > pd.size() || pd.size() > c.transversal_bound) c.index_bounds = false;
    if (index_bound && pd.size() > *index_bound) c.index_bounds = false;
  }
  if (!c.transversal_projection) fail("transversal projection");
  if (!c.index_bounds) fail("index bounds");

  c.beta_saturation = saturate(r.lifted, beta, budget) == Cl;
  if (!c.beta_saturation) fail("lifted[beta] = C");
  c.kappa_saturation = saturate(r.lifted, kappa, budget) == r.lifted;
  if (!c.kappa_saturation) fail("lifted[kappa] = lifted");

  {
    std::vector<std::vector<std::vector<Elem>>> pre(n);
    for (std::size_t i = 0; i < n; ++i) {
      pre[i].resize(r.star.factors[i].algebra.algebra.size());
      for (std::size_t x = 0; x < r.factor_maps[i].size(); ++x) pre[i][r.factor_maps[i][x]].push_back(static_cast<Elem>(x));
    }
    std::vector<Elem> flat;
    std::size_t count = 0;
    for (std::size_t t = 0; t < r.star.local.size(); ++t) {
      std::vector<const std::vector<Elem>*> lists;
      for (std::size_t i = 0; i < n; ++i) lists.push_back(&pre[i][r.star.local[t][i]]);
      for_each_product(lists, budget, count, [&](std::span<const Elem> x) { flat.insert(flat.end(), x.begin(), x.end()); });
    }
    c.inverse_image = Relation(n, std::move(flat)) == r.lifted;
  }
  if (!c.inverse_image) fail("factor-map preimage of B is lifted");
  c.index_equality = r.star.alpha_index() == c.d_alpha_index;
  if (!c.index_equality) fail("index equality");

  const auto sc = star_check(A, r.star, {max_power, index_bound}, budget);
  c.star_conditions = sc.ok();
  for (const auto& v : sc.violations) fail(v);

  const auto first_n = iota_vector(0, n);
  c.witness_onto = r.witness.project(first_n) == r.input;
  c.witness_injective = r.witness.size() == r.input.size();
  if (!c.witness_onto) fail("witness projection onto C");
  if (!c.witness_injective) fail("witness projection one-to-one");
  const auto rep = check_derivation(A, r.axioms, r.derivation, r.input, budget);
  c.derivation_accepted = rep.accepted;
  if (!rep.accepted) fail("derivation: " + rep.reason);
  return c;
}

// ---------------------------------------------------------------- arity reduction

Elem nested_difference(const Algebra& C, const Term& d, std::span<const Elem> xs, std::vector<Elem>& scratch) {
  if (xs.size() < 3) throw std::invalid_argument("nested difference needs exponent >= 2");
  const std::size_t exponent = xs.size() - 1;
  const Elem last = xs[exponent];
  Elem args[3] = {xs[0], last, xs[1]};
  Elem y = d.evaluate(C, args, scratch);
  for (std::size_t j = 2; j < exponent; ++j) {
    Elem more[3] = {y, last, xs[j]};
    y = d.evaluate(C, more, scratch);
  }
  return y;
}

std::size_t ModuleMaps::distinct() const {
  std::size_t k = 0;
  for (std::size_t i = 0; i < map_class.size(); ++i) k += map_class[i] == i;
  return k;
}

ModuleMaps module_maps(const StarRelation& B, const Term& d, const Budget& budget) {
  ModuleMaps maps;
  const std::size_t n = B.star_arity();
  maps.representatives = B.class_representatives();
  std::map<std::tuple<std::size_t, Elem>, ClassGroup> groups;  // (first coordinate with that factor, constant)
  std::vector<std::size_t> factor_id(n);
  for (std::size_t i = 0; i < n; ++i) {
    factor_id[i] = i;
    for (std::size_t j = 0; j < i; ++j)
      if (B.factors[j] == B.factors[i]) {
        factor_id[i] = factor_id[j];
        break;
      }
  }
  auto group = [&](std::size_t i, Elem o) -> const ClassGroup& {
    const auto key = std::make_tuple(factor_id[i], o);
    auto it = groups.find(key);
    if (it == groups.end())
      it = groups.emplace(key, class_group(B.factors[i].algebra.algebra, B.factors[i].alpha, o, d, budget)).first;
    return it->second;
  };
  maps.map_class.resize(n);
  std::vector<Elem> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    maps.map_class[i] = i;
    for (std::size_t j = 0; j < i; ++j) {
      if (maps.map_class[j] != j || factor_id[j] != factor_id[i]) continue;
      bool same = true;
      for (std::size_t r : maps.representatives) {
        const auto o = B.local[r];
        if (o[i] != o[j]) {
          same = false;
          break;
        }
        const ClassGroup& G = group(i, o[i]);
        for (Elem u : G.carrier()) {
          std::copy(o.begin(), o.end(), t.begin());
          t[i] = u;
          t[j] = G.negate(u);
          if (!B.local.contains(t)) {
            same = false;
            break;
          }
        }
        if (!same) break;
      }
      if (same) {
        maps.map_class[i] = j;
        break;
      }
    }
  }
  return maps;
}

Relation saturation(const StarRelation& B, const Budget& budget) { return saturate(B.local, factor_alphas(B.factors), budget); }

namespace {

struct SaturationLattice {
  Relation saturated;
  Algebra product;                 // elements are tuples of `saturated`
  std::vector<Elem> base;          // indices of the tuples of B
  std::vector<Elem> outside;       // indices of the other tuples
};

SaturationLattice saturation_lattice(const StarRelation& B, const Budget& budget) {
  SaturationLattice L;
  L.saturated = saturation(B, budget);
  std::vector<Algebra> algs;
  for (const auto& f : B.factors) algs.push_back(f.algebra.algebra);
  L.product = product_subalgebra(algs, L.saturated, budget);
  for (std::size_t k = 0; k < L.saturated.size(); ++k)
    (B.local.contains(L.saturated[k]) ? L.base : L.outside).push_back(static_cast<Elem>(k));
  return L;
}

Relation generated(const SaturationLattice& L, const std::vector<Elem>& gens, const Budget& budget) {
  return generate_subuniverse(L.product, 1, gens, budget);
}

StarRelation restrict_to(const StarRelation& B, const SaturationLattice& L, const Relation& members) {
  std::vector<Elem> flat;
  for (std::size_t k = 0; k < members.size(); ++k) {
    const auto t = L.saturated[members[k][0]];
    flat.insert(flat.end(), t.begin(), t.end());
  }
  return star_from_local(B.factors, Relation(B.star_arity(), std::move(flat)));
}

}  // namespace

bool irreducible_in_saturation(const StarRelation& B, const Budget& budget) {
  const auto L = saturation_lattice(B, budget);
  if (L.outside.empty()) return true;
  std::set<Relation> covers;
  for (Elem x : L.outside) {
    auto gens = L.base;
    gens.push_back(x);
    covers.insert(generated(L, gens, budget));
  }
  std::size_t minimal = 0;
  for (const auto& U : covers) {
    bool is_min = true;
    for (const auto& V : covers)
      if (!(V == U) && V.subset_of(U)) is_min = false;
    minimal += is_min;
  }
  return minimal == 1;
}

std::vector<StarRelation> irreducible_components(const StarRelation& B, const Budget& budget) {
  const auto L = saturation_lattice(B, budget);
  std::vector<Elem> base_flat(L.base);
  const Relation base(1, base_flat);
  if (L.outside.empty()) return {B};
  std::vector<Relation> comps;
  std::optional<Relation> meet;
  for (Elem x : L.outside) {
    if (meet && !meet->contains(std::span<const Elem>(&x, 1))) continue;
    Relation M = base;
    for (Elem z : L.outside) {
      if (z == x || M.contains(std::span<const Elem>(&z, 1))) continue;
      std::vector<Elem> gens(M.flat().begin(), M.flat().end());
      gens.push_back(z);
      Relation next = generated(L, gens, budget);
      if (!next.contains(std::span<const Elem>(&x, 1))) M = std::move(next);
    }
    meet = meet ? meet->intersect(M) : M;
    comps.push_back(std::move(M));
  }
  if (!(*meet == base)) throw std::logic_error("irreducible components do not intersect to the relation");
  std::vector<StarRelation> out;
  for (const auto& M : comps) out.push_back(restrict_to(B, L, M));
  return out;
}

CollapseResult collapse_first_coordinate(const StarRelation& B, std::size_t partner, const Budget& budget) {
  const std::size_t n = B.star_arity();
  if (n < 2 || partner + 1 >= n) throw std::invalid_argument("partner coordinate out of range");
  if (!(B.factors[partner + 1] == B.factors[0])) throw std::invalid_argument("partner carries a different factor");
  const auto& alpha = B.factors[0].alpha;
  const auto proj = B.local.coordinate_values(0);
  CollapseResult c;
  const std::size_t m = B.factors[0].algebra.algebra.size();
  c.representative.resize(m);
  std::vector<Elem> graph;
  for (std::size_t x = 0; x < m; ++x) {
    std::size_t hits = 0;
    for (Elem v : proj)
      if (alpha.related(x, v)) {
        c.representative[x] = v;
        ++hits;
      }
    if (hits != 1) throw HypothesisError("alpha is not trivial on the first projection");
    graph.push_back(static_cast<Elem>(x));
    graph.push_back(static_cast<Elem>(c.representative[x]));
  }
  budget.charge(graph.size(), "collapse");
  c.collapse_graph = Relation(2, std::move(graph));
  c.rest = B.local.project(iota_vector(1, n));
  std::vector<Elem> representative_labels(c.representative.begin(), c.representative.end());
  c.kernel_is_alpha = Partition::from_labels(std::span<const Elem>(representative_labels)) == alpha;
  std::vector<Elem> flat;
  for (std::size_t r = 0; r < c.rest.size(); ++r) {
    flat.push_back(static_cast<Elem>(c.representative[c.rest[r][partner]]));
    const auto t = c.rest[r];
    flat.insert(flat.end(), t.begin(), t.end());
  }
  c.reconstructs = Relation(n, std::move(flat)) == B.local;
  return c;
}

ArityReduction lm_main_reduce(const Algebra& A, const StarRelation& B, const Term& d, std::size_t exponent,
                              const Budget& budget) {
  if (exponent < 2) throw std::invalid_argument("exponent must be at least 2");
  ArityReduction r;
  r.exponent = exponent;
  const std::size_t n = B.star_arity();
  if (n <= exponent + 1) {
    r.reason = "star arity " + std::to_string(n) + " is at most exponent + 1";
    return r;
  }
  if (!irreducible_in_saturation(B, budget))
    throw HypothesisError("relation is not intersection-irreducible in its alpha-saturation");
  r.maps = module_maps(B, d, budget);
  {
    std::map<std::size_t, std::vector<std::size_t>> by_psi;
    for (std::size_t i = 0; i < n; ++i) by_psi[r.maps.map_class[i]].push_back(i);
    for (const auto& [label, members] : by_psi)
      if (members.size() >= exponent + 2) {
        r.block.assign(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(exponent + 2));
        break;
      }
  }
  if (r.block.empty()) {
    r.reason = "no exponent + 2 coordinates share module and module map";
    return r;
  }
  r.applicable = true;
  r.permutation = r.block;
  for (std::size_t i = 0; i < n; ++i)
    if (std::find(r.block.begin(), r.block.end(), i) == r.block.end()) r.permutation.push_back(i);
  r.permuted = permute_star(B, r.permutation);
  const StarRelation& P = r.permuted;
  const StarFactor bar = P.factors[0];
  const Algebra& barA = bar.algebra.algebra;
  r.saturated = saturation(P, budget);

  const auto reps = P.class_representatives();
  std::map<std::vector<Elem>, Elem> constant_of;  // alpha labels of a class -> first-coordinate constant
  for (std::size_t k : reps) constant_of.emplace(alpha_labels(P.factors, P.local[k]), P.local[k][0]);
  std::map<Elem, ClassGroup> groups;
  auto group = [&](Elem o) -> const ClassGroup& {
    auto it = groups.find(o);
    if (it == groups.end()) it = groups.emplace(o, class_group(barA, bar.alpha, o, d, budget)).first;
    return it->second;
  };

  r.alpha_related = r.y_equivalence = r.y_is_sum = true;
  std::vector<Elem> scratch, probe(n), bp_flat;
  const std::size_t tail = n - exponent - 1;
  for (std::size_t s = 0; s < r.saturated.size(); ++s) {
    const auto x = r.saturated[s];
    for (std::size_t k = 1; k <= exponent; ++k)
      if (!bar.alpha.related(x[0], x[k])) r.alpha_related = false;
    const Elem y = nested_difference(barA, d, x.subspan(0, exponent + 1), scratch);
    auto it = constant_of.find(alpha_labels(P.factors, x));
    if (it == constant_of.end()) throw std::logic_error("saturation class without a representative");
    const ClassGroup& G = group(it->second);
    Elem sum = x[0];
    for (std::size_t k = 1; k <= exponent; ++k) sum = G.add(sum, x[k]);
    if (sum != y) r.y_is_sum = false;
    std::fill(probe.begin(), probe.begin() + static_cast<std::ptrdiff_t>(exponent + 1), y);
    std::copy(x.begin() + static_cast<std::ptrdiff_t>(exponent + 1), x.end(), probe.begin() + static_cast<std::ptrdiff_t>(exponent + 1));
    const bool in_b = P.local.contains(x);
    if (in_b != P.local.contains(probe)) r.y_equivalence = false;
    if (in_b) {
      bp_flat.push_back(y);
      bp_flat.insert(bp_flat.end(), x.begin() + static_cast<std::ptrdiff_t>(exponent + 1), x.end());
    }
    ++r.tuples_checked;
  }
  r.summed = Relation(1 + tail, std::move(bp_flat));
  {
    std::vector<Elem> flat;
    for (std::size_t t = 0; t < P.local.size(); ++t) {
      const auto x = P.local[t];
      bool diagonal = true;
      for (std::size_t k = 1; k <= exponent; ++k) diagonal = diagonal && x[k] == x[0];
      if (!diagonal) continue;
      flat.push_back(x[0]);
      flat.insert(flat.end(), x.begin() + static_cast<std::ptrdiff_t>(exponent + 1), x.end());
    }
    if (!(Relation(1 + tail, std::move(flat)) == r.summed)) r.y_equivalence = false;
  }

  {
    std::vector<Elem> flat;
    std::size_t count = 0;
    for (const auto& K : bar.alpha.blocks()) {
      std::vector<const std::vector<Elem>*> lists(exponent + 1, &K);
      for_each_product(lists, budget, count, [&](std::span<const Elem> xs) {
        flat.push_back(nested_difference(barA, d, xs, scratch));
        flat.insert(flat.end(), xs.begin(), xs.end());
      });
    }
    r.sum_graph = Relation(exponent + 2, std::move(flat));
  }
  {
    std::map<Elem, std::vector<std::size_t>> by_y;
    for (std::size_t t = 0; t < r.summed.size(); ++t) by_y[r.summed[t][0]].push_back(t);
    std::vector<Elem> flat;
    for (std::size_t t = 0; t < r.sum_graph.size(); ++t) {
      const auto dt = r.sum_graph[t];
      auto it = by_y.find(dt[0]);
      if (it == by_y.end()) continue;
      for (std::size_t b : it->second) {
        flat.insert(flat.end(), dt.begin(), dt.end());
        const auto bt = r.summed[b];
        flat.insert(flat.end(), bt.begin() + 1, bt.end());
        budget.charge(flat.size(), "W relation");
      }
    }
    r.joined = Relation(n + 1, std::move(flat));
    const Relation dropped = r.joined.project(iota_vector(1, n + 1));
    r.w_injective = dropped.size() == r.joined.size();
    r.w_onto = dropped == P.local;
  }

  const auto proj = r.summed.coordinate_values(0);
  bool trivial = true;
  for (std::size_t a = 0; a < proj.size(); ++a)
    for (std::size_t b = a + 1; b < proj.size(); ++b)
      if (bar.alpha.related(proj[a], proj[b])) trivial = false;
  std::vector<StarFactor> rest(P.factors.begin() + static_cast<std::ptrdiff_t>(exponent + 1), P.factors.end());
  if (trivial) {
    r.collapsed = true;
    std::vector<StarFactor> with_bar{bar};
    with_bar.insert(with_bar.end(), rest.begin(), rest.end());
    r.collapse = collapse_first_coordinate(star_from_local(with_bar, r.summed), 0, budget);
    r.reduced = star_from_local(rest, r.collapse->rest);
  } else if (proj.size() == barA.size()) {
    std::vector<StarFactor> f{bar};
    f.insert(f.end(), rest.begin(), rest.end());
    r.reduced = star_from_local(std::move(f), r.summed);
  } else {
    std::vector<Elem> sub_flat, labels, remap(barA.size(), 0);
    for (std::size_t k = 0; k < proj.size(); ++k) {
      const auto g = bar.algebra.global(proj[k]);
      sub_flat.insert(sub_flat.end(), g.begin(), g.end());
      labels.push_back(bar.alpha.rep(proj[k]));
      remap[proj[k]] = static_cast<Elem>(k);
    }
    Subpower sub = make_subpower(A, Relation(bar.algebra.power(), sub_flat), barA.name() + "'", budget);
    std::vector<StarFactor> f{StarFactor{std::move(sub), Partition::from_labels(std::span<const Elem>(labels))}};
    f.insert(f.end(), rest.begin(), rest.end());
    std::vector<Elem> flat(r.summed.flat().begin(), r.summed.flat().end());
    for (std::size_t t = 0; t < r.summed.size(); ++t) flat[t * (1 + tail)] = remap[flat[t * (1 + tail)]];
    r.reduced = star_from_local(std::move(f), Relation(1 + tail, std::move(flat)));
  }
  return r;
}

namespace {

class Certifier {
 public:
  Certifier(const Algebra& A, const Term& d, std::size_t exponent, std::size_t floor, const Budget& budget,
            IterationResult& out)
      : A_(A), d_(d), exponent_(exponent), floor_(floor), budget_(budget), out_(out) {}

  std::size_t derive(const StarRelation& S) {
    if (S.star_arity() <= floor_) return leaf(S);
    if (S.star_arity() > exponent_ + 1 && !irreducible_in_saturation(S, budget_)) {
      const auto comps = irreducible_components(S, budget_);
      out_.components += comps.size();
      std::size_t acc = derive(comps.front());
      for (std::size_t k = 1; k < comps.size(); ++k) {
        const std::size_t next = derive(comps[k]);
        acc = out_.derivation.add(DerivationStep::intersect(acc, next));
      }
      return acc;
    }
    const auto red = lm_main_reduce(A_, S, d_, exponent_, budget_);
    if (!red.applicable) return leaf(S);
    if (!red.ok()) throw std::logic_error("arity reduction checks failed on a relation of star arity " +
                                          std::to_string(S.star_arity()));
    const std::size_t round = out_.rounds++;
    out_.arities.push_back(red.reduced.star_arity());
    out_.steps.emplace_back(S.star_arity(), red.reduced.star_arity());
    const std::size_t next = derive(red.reduced);

    const StarRelation& P = red.permuted;
    const StarFactor& bar = P.factors[0];
    const std::size_t pb = bar.algebra.power();
    const std::vector<const Subpower*> bar_block(exponent_ + 2, &bar.algebra);
    const std::string sum_name = "sum#" + std::to_string(round);
    out_.axioms[sum_name] = to_raw(red.sum_graph, bar_block);

    std::vector<const Subpower*> summed_factors{&bar.algebra};
    for (std::size_t j = exponent_ + 1; j < P.star_arity(); ++j) summed_factors.push_back(&P.factors[j].algebra);
    const Relation summed_raw = to_raw(red.summed, summed_factors);
    const std::size_t tail_raw = P.relation.arity() - (exponent_ + 1) * pb;

    std::size_t summed_step = next;
    if (red.collapsed) {
      const std::string collapse_name = "collapse#" + std::to_string(round);
      out_.axioms[collapse_name] = to_raw(red.collapse->collapse_graph, {&bar.algebra, &bar.algebra});
      const std::string f_name = factor_name(bar.algebra);
      AxiomSet local{{f_name, out_.axioms.at(f_name)}, {collapse_name, out_.axioms.at(collapse_name)},
                     {"@next", red.reduced.relation}};
      const std::size_t width = pb + tail_raw;
      std::vector<std::size_t> partner_then_y = iota_vector(pb, 2 * pb);
      for (std::size_t v = 0; v < pb; ++v) partner_then_y.push_back(v);
      const auto part = conjunction_derivation(
          local, width, {{f_name, iota_vector(0, pb)}, {"@next", iota_vector(pb, width)}, {collapse_name, partner_then_y}});
      summed_step = embed(part, {{"@next", {next, red.reduced.relation.arity()}}});
    }

    // W over (y, x_1..x_{exponent+1}, rest), then drop y and undo the block permutation.
    const std::size_t width = pb + P.relation.arity();
    const auto offs = P.offsets();
    AxiomSet local{{sum_name, out_.axioms.at(sum_name)}, {"@summed", summed_raw}};
    std::vector<Atom> atoms{{sum_name, iota_vector(0, (exponent_ + 2) * pb)}};
    std::vector<std::size_t> summed_vars = iota_vector(0, pb);
    for (std::size_t v = pb + (exponent_ + 1) * pb; v < width; ++v) summed_vars.push_back(v);
    atoms.push_back({"@summed", summed_vars});
    for (std::size_t j = 0; j < P.star_arity(); ++j) {
      const std::string f = factor_name(P.factors[j].algebra);
      local.emplace(f, out_.axioms.at(f));
      atoms.push_back({f, iota_vector(pb + offs[j], pb + offs[j] + P.factors[j].algebra.power())});
    }
    const auto part = conjunction_derivation(local, width, atoms);
    std::size_t w = embed(part, {{"@summed", {summed_step, summed_raw.arity()}}});
    std::size_t result = out_.derivation.add(DerivationStep::retract_project(w, iota_vector(pb, width)));

    std::vector<std::size_t> back;
    for (std::size_t i = 0; i < S.star_arity(); ++i) {
      const std::size_t pos = static_cast<std::size_t>(
          std::find(red.permutation.begin(), red.permutation.end(), i) - red.permutation.begin());
      for (std::size_t k = 0; k < S.factors[i].algebra.power(); ++k) back.push_back(offs[pos] + k);
    }
    bool identity = true;
    for (std::size_t c = 0; c < back.size(); ++c) identity = identity && back[c] == c;
    if (!identity) result = out_.derivation.add(DerivationStep::permute(result, back));
    return result;
  }

 private:
  std::size_t leaf(const StarRelation& S) {
    const std::string name = "R#" + std::to_string(leaves_++);
    out_.axioms[name] = S.relation;
    return out_.derivation.add(DerivationStep::axiom_step(name));
  }

  std::string factor_name(const Subpower& f) {
    auto it = factor_names_.find(f.universe);
    if (it == factor_names_.end()) {
      it = factor_names_.emplace(f.universe, "F#" + std::to_string(factor_names_.size())).first;
      out_.axioms[it->second] = f.universe;
    }
    return it->second;
  }

  // Appends `part`, replacing bound axiom names by earlier steps.
  std::size_t embed(const Derivation& part, const std::map<std::string, std::pair<std::size_t, std::size_t>>& bound) {
    std::vector<std::size_t> at;
    for (const auto& s : part.steps) {
      DerivationStep t = s;
      using K = DerivationStep::Kind;
      if (s.kind == K::Axiom) {
        auto it = bound.find(s.axiom);
        if (it != bound.end()) t = DerivationStep::permute(it->second.first, iota_vector(0, it->second.second));
      } else if (s.kind == K::Intersect || s.kind == K::Product) {
        t.first = at.at(s.first);
        t.second = at.at(s.second);
      } else if (s.kind == K::Permute || s.kind == K::RetractProject) {
        t.first = at.at(s.first);
      }
      at.push_back(out_.derivation.add(std::move(t)));
    }
    return at.back();
  }

  const Algebra& A_;
  const Term& d_;
  std::size_t exponent_, floor_;
  const Budget& budget_;
  IterationResult& out_;
  std::map<Relation, std::string> factor_names_;
  std::size_t leaves_ = 0;
};

}  // namespace

IterationResult iterate_reduction(const Algebra& A, const StarRelation& B, const Term& d, std::size_t exponent,
                                  std::size_t floor, const Budget& budget) {
  if (exponent < 2) throw std::invalid_argument("exponent must be at least 2");
  IterationResult out;
  out.arities.push_back(B.star_arity());
  Certifier cert(A, d, exponent, floor, budget, out);
  cert.derive(B);
  out.replay = check_derivation(A, out.axioms, out.derivation, B.relation, budget);
  return out;
}

}  // namespace algwb
