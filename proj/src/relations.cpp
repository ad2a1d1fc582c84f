#include "algwb/relations.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "algwb/closure.hpp"
#include "algwb/congruence.hpp"
#include "algwb/homomorphism.hpp"

namespace algwb {

namespace {

Relation equality_relation(std::size_t n, std::size_t arity) {
  std::vector<Elem> flat;
  for (std::size_t x = 0; x < n; ++x) flat.insert(flat.end(), arity, static_cast<Elem>(x));
  return Relation(arity, std::move(flat));
}

std::size_t power_size(std::size_t n, std::size_t r, const Budget& budget) {
  std::size_t s = 1;
  for (std::size_t i = 0; i < r; ++i) {
    if (n != 0 && s > budget.limit / n) throw BudgetExceeded("relation arity", budget.limit);
    s *= n;
  }
  return s;
}

bool strictly_increasing(const std::vector<std::size_t>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i - 1] >= v[i]) return false;
  return true;
}

void require(bool cond, const std::string& reason) {
  if (!cond) throw DerivationError(reason);
}

const Relation& earlier_at(const std::vector<Relation>& earlier, std::size_t i) {
  require(i < earlier.size(), "reference to step " + std::to_string(i) + " which is not earlier");
  return earlier[i];
}

Relation retract_project(const Algebra& A, const DerivationStep& step, const Relation& B, const Budget& budget) {
  const auto& I = step.coordinates;
  require(!I.empty() && strictly_increasing(I) && I.back() < B.arity(), "projection coordinates invalid");
  const Relation image = B.project(I);
  if (!step.retraction) {
    require(image.size() == B.size(), "projection is not bijective and no retraction was supplied");
    return image;
  }
  const Relation& g = *step.retraction;
  const std::size_t k = I.size();
  require(g.arity() == k + B.arity(), "retraction graph has wrong arity");
  require(g.size() == image.size(), "retraction is not a function on the projection");
  std::vector<std::size_t> head(k);
  for (std::size_t j = 0; j < k; ++j) head[j] = j;
  require(g.project(head) == image, "retraction domain differs from the projection");
  for (std::size_t t = 0; t < g.size(); ++t) {
    const auto row = g[t];
    const std::span<const Elem> val = row.subspan(k);
    require(B.contains(val), "retraction leaves the relation");
    for (std::size_t j = 0; j < k; ++j)
      require(val[I[j]] == row[j], "retraction is not a section of the projection");
  }
  require(is_subuniverse(A, g, budget), "retraction is not a homomorphism");
  return image;
}

}  // namespace

bool is_compatible(const Algebra& A, const Relation& rho, const Budget& budget) {
  if (rho.empty()) return false;
  for (Elem v : rho.flat())
    if (v >= A.size()) return false;
  return is_subuniverse(A, rho, budget);
}

std::optional<Retraction> retraction_exists(const Algebra& A, const Relation& B,
                                            const std::vector<std::size_t>& coordinates, const Budget& budget) {
  if (coordinates.empty() || !strictly_increasing(coordinates) || coordinates.back() >= B.arity())
    throw std::invalid_argument("projection coordinates must be increasing and in range");
  const Relation image = B.project(coordinates);
  const Subpower src = make_subpower(A, image, "proj", budget);
  const Subpower tgt = make_subpower(A, B, "B", budget);
  HomSearchOptions opt;
  opt.budget = budget;
  opt.limit = 1;
  opt.allowed.assign(image.size(), {});
  std::vector<Elem> key(coordinates.size());
  for (std::size_t t = 0; t < B.size(); ++t) {
    for (std::size_t j = 0; j < coordinates.size(); ++j) key[j] = B[t][coordinates[j]];
    opt.allowed[*image.index_of(key)].push_back(static_cast<Elem>(t));
  }
  auto found = homomorphisms(src.algebra, tgt.algebra, opt);
  if (found.empty()) return std::nullopt;
  std::vector<Elem> flat;
  for (std::size_t t = 0; t < image.size(); ++t) {
    const auto a = image[t];
    const auto b = B[found.front().image[t]];
    flat.insert(flat.end(), a.begin(), a.end());
    flat.insert(flat.end(), b.begin(), b.end());
  }
  return Retraction{Relation(coordinates.size() + B.arity(), std::move(flat)), std::move(found.front())};
}

DerivationStep DerivationStep::axiom_step(std::string name) {
  DerivationStep s;
  s.kind = Kind::Axiom;
  s.axiom = std::move(name);
  return s;
}

DerivationStep DerivationStep::equality(std::size_t arity) {
  DerivationStep s;
  s.kind = Kind::Equality;
  s.arity = arity;
  return s;
}

DerivationStep DerivationStep::full(std::size_t arity) {
  DerivationStep s;
  s.kind = Kind::Full;
  s.arity = arity;
  return s;
}

DerivationStep DerivationStep::intersect(std::size_t a, std::size_t b) {
  DerivationStep s;
  s.kind = Kind::Intersect;
  s.first = a;
  s.second = b;
  return s;
}

DerivationStep DerivationStep::product(std::size_t a, std::size_t b) {
  DerivationStep s = intersect(a, b);
  s.kind = Kind::Product;
  return s;
}

DerivationStep DerivationStep::permute(std::size_t a, std::vector<std::size_t> perm) {
  DerivationStep s;
  s.kind = Kind::Permute;
  s.first = a;
  s.coordinates = std::move(perm);
  return s;
}

DerivationStep DerivationStep::retract_project(std::size_t a, std::vector<std::size_t> kept,
                                               std::optional<Relation> retraction) {
  DerivationStep s;
  s.kind = Kind::RetractProject;
  s.first = a;
  s.coordinates = std::move(kept);
  s.retraction = std::move(retraction);
  return s;
}

const char* kind_name(DerivationStep::Kind k) {
  switch (k) {
    case DerivationStep::Kind::Axiom: return "axiom";
    case DerivationStep::Kind::Equality: return "equality";
    case DerivationStep::Kind::Full: return "full";
    case DerivationStep::Kind::Intersect: return "intersect";
    case DerivationStep::Kind::Product: return "product";
    case DerivationStep::Kind::Permute: return "permute";
    case DerivationStep::Kind::RetractProject: return "retract_project";
  }
  return "?";
}

Relation apply_construct(const Algebra& A, const DerivationStep& step, const std::vector<Relation>& earlier,
                         const AxiomSet& axioms, const Budget& budget) {
  using K = DerivationStep::Kind;
  switch (step.kind) {
    case K::Axiom: {
      auto it = axioms.find(step.axiom);
      require(it != axioms.end(), "unknown axiom '" + step.axiom + "'");
      require(is_compatible(A, it->second, budget), "axiom '" + step.axiom + "' is not compatible");
      return it->second;
    }
    case K::Equality:
      require(step.arity >= 1, "equality relation needs arity >= 1");
      return equality_relation(A.size(), step.arity);
    case K::Full:
      require(step.arity >= 1, "full relation needs arity >= 1");
      power_size(A.size(), step.arity, budget);
      return Relation::full(A.size(), step.arity);
    case K::Intersect: {
      const Relation& a = earlier_at(earlier, step.first);
      const Relation& b = earlier_at(earlier, step.second);
      require(a.arity() == b.arity(), "intersection of relations of different arity");
      Relation r = a.intersect(b);
      require(!r.empty(), "empty intersection");
      return r;
    }
    case K::Product: {
      const Relation& a = earlier_at(earlier, step.first);
      const Relation& b = earlier_at(earlier, step.second);
      budget.charge(a.size() * b.size(), "relation product");
      return a.product(b);
    }
    case K::Permute: {
      const Relation& a = earlier_at(earlier, step.first);
      std::vector<std::size_t> sorted = step.coordinates;
      std::sort(sorted.begin(), sorted.end());
      bool perm = sorted.size() == a.arity();
      for (std::size_t i = 0; perm && i < sorted.size(); ++i) perm = sorted[i] == i;
      require(perm, "not a permutation of the coordinates");
      return a.permute(step.coordinates);
    }
    case K::RetractProject: return retract_project(A, step, earlier_at(earlier, step.first), budget);
  }
  throw DerivationError("unknown step kind");
}

DerivationReport check_derivation(const Algebra& A, const AxiomSet& axioms, const Derivation& d, const Relation& goal,
                                  const Budget& budget, bool recheck_outputs) {
  DerivationReport rep;
  std::vector<Relation> out;
  for (std::size_t i = 0; i < d.steps.size(); ++i) {
    const auto& step = d.steps[i];
    try {
      Relation r = apply_construct(A, step, out, axioms, budget);
      require(!r.empty(), "step output is empty");
      if (recheck_outputs && step.kind != DerivationStep::Kind::Axiom)
        require(is_compatible(A, r, budget), "step output is not compatible");
      out.push_back(std::move(r));
    } catch (const DerivationError& e) {
      rep.failed_step = i;
      rep.reason = e.what();
      return rep;
    }
    ++rep.step_counts[static_cast<std::size_t>(step.kind)];
    if (step.kind == DerivationStep::Kind::RetractProject) {
      if (step.retraction)
        ++rep.retractive_projections;
      else
        ++rep.bijective_projections;
    }
  }
  if (out.empty()) {
    rep.reason = "empty derivation";
    return rep;
  }
  rep.result = out.back();
  rep.accepted = out.back() == goal;
  if (!rep.accepted) rep.reason = "derived relation differs from the goal";
  return rep;
}

Derivation conjunction_derivation(const AxiomSet& axioms, std::size_t arity, const std::vector<Atom>& atoms) {
  if (atoms.empty()) throw std::invalid_argument("conjunction needs at least one atom");
  Derivation d;
  std::optional<std::size_t> acc;
  for (const auto& atom : atoms) {
    auto it = axioms.find(atom.axiom);
    if (it == axioms.end()) throw std::invalid_argument("unknown axiom '" + atom.axiom + "'");
    const std::size_t r = it->second.arity();
    if (atom.variables.size() != r) throw std::invalid_argument("atom arity mismatch");
    std::vector<int> at(arity, -1);
    for (std::size_t p = 0; p < r; ++p) {
      if (atom.variables[p] >= arity || at[atom.variables[p]] >= 0)
        throw std::invalid_argument("atom variables must be distinct and in range");
      at[atom.variables[p]] = static_cast<int>(p);
    }
    std::size_t cur = d.add(DerivationStep::axiom_step(atom.axiom));
    std::size_t next_free = r;
    for (std::size_t e = r; e < arity; ++e) cur = d.add(DerivationStep::product(cur, d.add(DerivationStep::full(1))));
    std::vector<std::size_t> perm(arity);
    for (std::size_t v = 0; v < arity; ++v)
      perm[v] = at[v] >= 0 ? static_cast<std::size_t>(at[v]) : next_free++;
    bool identity = true;
    for (std::size_t v = 0; v < arity; ++v) identity = identity && perm[v] == v;
    if (!identity) cur = d.add(DerivationStep::permute(cur, perm));
    acc = acc ? d.add(DerivationStep::intersect(*acc, cur)) : cur;
  }
  return d;
}

CriticalVerdict is_critical(const Algebra& A, const Relation& rho, const Budget& budget) {
  if (!is_compatible(A, rho, budget)) throw std::invalid_argument("is_critical needs a compatible relation");
  CriticalVerdict v;
  const std::size_t r = rho.arity();
  const std::size_t total = power_size(A.size(), r, budget);

  if (rho.size() == total) {
    v.full_relation = true;
    v.irreducible = true;
  } else {
    std::optional<Relation> meet;
    std::vector<Elem> t(r, 0);
    std::vector<Elem> gens(rho.flat().begin(), rho.flat().end());
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rest = idx;
      for (std::size_t c = r; c-- > 0;) {
        t[c] = static_cast<Elem>(rest % A.size());
        rest /= A.size();
      }
      if (rho.contains(t)) continue;
      gens.resize(rho.flat().size());
      gens.insert(gens.end(), t.begin(), t.end());
      ClosureOptions opt;
      opt.budget = budget;
      opt.closed_prefix = rho.size();
      Relation ext = close_subpower(A, r, gens, opt).tuples.to_relation();
      meet = meet ? meet->intersect(ext) : ext;
      if (*meet == rho) break;
    }
    v.irreducible = meet && !(*meet == rho);
    if (v.irreducible)
      for (std::size_t i = 0; i < meet->size(); ++i)
        if (!rho.contains((*meet)[i])) {
          v.irreducibility_witness = meet->tuple(i);
          break;
        }
  }

  v.indecomposable = true;
  // coordinate 0 always in I, so each unordered bipartition is tried once
  for (std::size_t mask = 0; r > 1 && mask + 1 < (std::size_t{1} << (r - 1)); ++mask) {
    std::vector<std::size_t> I{0}, J;
    for (std::size_t c = 1; c < r; ++c) (mask >> (c - 1) & 1 ? I : J).push_back(c);
    if (rho.size() == rho.project(I).size() * rho.project(J).size()) {
      v.indecomposable = false;
      v.factorization = std::make_pair(I, J);
      break;
    }
  }
  return v;
}

bool ReducedRepresentation::degenerate() const {
  for (const auto& f : factors)
    if (f.degenerate) return true;
  return false;
}

bool ReducedRepresentation::all_relevant() const {
  for (const auto& f : factors)
    if (f.degenerate || !f.abelian) return false;
  return true;
}

bool ReducedRepresentation::same_coordinate_class(std::size_t i, std::size_t j) const {
  if (!(factors.at(i) == factors.at(j))) return false;
  if (iotas.empty()) return true;
  const auto& img = iota(i, j).image;
  for (std::size_t b = 0; b < img.size(); ++b)
    if (img[b] != b) return false;
  return true;
}

ReducedRepresentation reduced_representation(const Algebra& A, const Relation& C, const CmGuard& guard,
                                             const Budget& budget) {
  if (!is_compatible(A, C, budget)) throw std::invalid_argument("reduced_representation needs a compatible relation");
  ReducedRepresentation rep;
  rep.relation = C;
  const std::size_t n = C.arity();
  std::map<Relation, CommutatorTable> tables;
  std::vector<Elem> flat(C.flat().begin(), C.flat().end());

  for (std::size_t i = 0; i < n; ++i) {
    const auto vals = C.coordinate_values(i);
    const Relation U(1, std::vector<Elem>(vals.begin(), vals.end()));
    CoordinateFactor f{make_subpower(A, U, A.name() + "_" + std::to_string(i), budget), {}, 0, 0, 0, false, false};
    for (std::size_t t = 0; t < C.size(); ++t)
      flat[t * n + i] = static_cast<Elem>(f.algebra.local(C[t][i]));
    auto it = tables.find(U);
    if (it == tables.end()) it = tables.emplace(U, CommutatorTable::compute(f.algebra.algebra, budget)).first;
    f.table = it->second;
    rep.factors.push_back(std::move(f));
  }
  rep.local = Relation(n, std::move(flat));

  for (std::size_t i = 0; i < n; ++i) {
    auto& f = rep.factors[i];
    const auto& L = f.table.lattice();
    std::size_t acc = L.bottom();
    for (std::size_t e = 0; e < L.size(); ++e)
      if (saturates(rep.local, i, L[e])) acc = L.join(acc, e);
    if (!saturates(rep.local, i, L[acc])) throw std::logic_error("saturating congruences are not join-closed");
    for (std::size_t u : L.upper_covers(acc))
      if (saturates(rep.local, i, L[u])) throw std::logic_error("saturating congruence is not maximal");
    f.delta = acc;
    if (acc == L.top()) {
      f.degenerate = true;
      f.theta = f.nu = acc;
      continue;
    }
    const auto covers = L.upper_covers(acc);
    if (covers.size() != 1)
      throw HypothesisError("delta_" + std::to_string(i) + " is not completely meet irreducible");
    f.theta = covers.front();
    f.nu = f.table.centralizer(f.delta, f.theta, guard);
    f.abelian = L.leq(f.table.comm(f.theta, f.theta), f.delta);
  }
  if (rep.degenerate()) return rep;

  std::vector<Quotient> quot;
  for (const auto& f : rep.factors) quot.push_back(quotient(f.algebra.algebra, f.table[f.nu]));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::string name = "iota_" + std::to_string(i) + std::to_string(j);
      const std::size_t si = quot[i].algebra.size(), sj = quot[j].algebra.size();
      constexpr Elem kUnset = std::numeric_limits<Elem>::max();
      std::vector<Elem> img(si, kUnset);
      for (std::size_t t = 0; t < rep.local.size(); ++t) {
        const Elem bi = quot[i].natural.image[rep.local[t][i]];
        const Elem bj = quot[j].natural.image[rep.local[t][j]];
        if (img[bi] == kUnset)
          img[bi] = bj;
        else if (img[bi] != bj)
          throw HypothesisError(name + " is not single-valued");
      }
      std::vector<char> hit(sj, 0);
      for (Elem b : img) {
        if (b == kUnset) throw HypothesisError(name + " is not defined everywhere");
        if (hit[b]) throw HypothesisError(name + " is not injective");
        hit[b] = 1;
      }
      if (si != sj) throw HypothesisError(name + " is not surjective");
      HomMap h{quot[i].algebra, quot[j].algebra, std::move(img)};
      if (!h.verify()) throw HypothesisError(name + " does not preserve the operations");
      rep.iotas.push_back(std::move(h));
    }
  return rep;
}

}  // namespace algwb
