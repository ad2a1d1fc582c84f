#include "algwb/splitcheck.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "algwb/closure.hpp"
#include "algwb/congruence.hpp"
#include "algwb/homomorphism.hpp"
#include "algwb/modules.hpp"
#include "algwb/terms.hpp"

namespace algwb {

namespace {

Partition joint_kernel(std::size_t n, const std::vector<HomMap>& maps) {
  Partition k = Partition::full(n);
  for (const auto& h : maps) k = k.meet(h.kernel());
  return k;
}

// Calls visit on every r-subset of [0, m) in lexicographic order; stops when visit returns true.
template <class Visit>
bool for_each_combination(std::size_t m, std::size_t r, const Budget& budget, std::size_t& visited, Visit visit) {
  std::vector<std::size_t> pick(r);
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  if (r > m) return false;
  while (true) {
    budget.charge(++visited, "q-congruence cover search");
    if (visit(pick)) return true;
    std::size_t i = r;
    while (i > 0 && pick[i - 1] == m - r + i - 1) --i;
    if (i == 0) return false;
    ++pick[i - 1];
    for (std::size_t j = i; j < r; ++j) pick[j] = pick[j - 1] + 1;
  }
}

struct QCache {
  const Algebra& A;
  const CommutatorTable& T;
  const Budget& budget;
  std::map<std::size_t, std::optional<QEmbedding>> memo;

  const std::optional<QEmbedding>& get(std::size_t kappa) {
    auto it = memo.find(kappa);
    if (it == memo.end()) it = memo.emplace(kappa, is_q_congruence(A, T.algebra(), T[kappa], budget)).first;
    return it->second;
  }
};

bool cheap_conditions(const CommutatorTable& T, const RelevantTriple& t, std::size_t alpha, std::size_t beta,
                      std::size_t kappa) {
  const auto& L = T.lattice();
  return L.leq(beta, t.delta) && L.meet(alpha, beta) == kappa && L.join(alpha, beta) == t.nu &&
         L.leq(T.comm(alpha, alpha), kappa);
}

std::optional<SplittingTriple> try_candidate(const Algebra& A, const CommutatorTable& T, const RelevantTriple& t,
                                             QCache& cache, std::size_t alpha, std::size_t beta, std::size_t kappa,
                                             const char* route) {
  if (!cheap_conditions(T, t, alpha, beta, kappa)) return std::nullopt;
  const auto& q = cache.get(kappa);
  if (!q) return std::nullopt;
  SplittingTriple s{alpha, beta, kappa, *q, route};
  if (!verify_splitting(A, T, t, s).all()) return std::nullopt;
  return s;
}

// A/chi solvable: the derived series of the quotient reaches chi.
bool solvable_quotient(const CommutatorTable& T, std::size_t chi) {
  std::size_t g = T.top();
  while (true) {
    const std::size_t next = T.lattice().join(T.comm(g, g), chi);
    if (next == g) break;
    g = next;
  }
  return g == chi;
}

// A/chi satisfies [1, x] = x for every x.
bool c8_quotient(const CommutatorTable& T, std::size_t chi) {
  const auto& L = T.lattice();
  for (std::size_t x = 0; x < T.size(); ++x)
    if (L.leq(chi, x) && L.join(T.comm(T.top(), x), chi) != x) return false;
  return true;
}

bool abelian_quotient(const CommutatorTable& T, std::size_t chi) {
  return T.lattice().leq(T.comm(T.top(), T.top()), chi);
}

std::optional<std::uint64_t> power_u64(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) return std::nullopt;
    r *= base;
  }
  return r;
}

bool is_prime_power_of(std::size_t n, std::size_t p) {
  while (n > 1 && n % p == 0) n /= p;
  return n == 1;
}

}  // namespace

std::vector<Elem> QEmbedding::tuple(Elem x) const {
  std::vector<Elem> t;
  t.reserve(maps.size());
  for (const auto& h : maps) t.push_back(h.image.at(x));
  return t;
}

std::optional<QEmbedding> is_q_congruence(const Algebra& A, const Algebra& B, const Partition& kappa,
                                          const Budget& budget) {
  if (kappa.size() != B.size()) throw std::invalid_argument("kappa lives on a different universe");
  if (!is_congruence(B, kappa)) throw std::invalid_argument("kappa is not a congruence");
  HomSearchOptions opts;
  opts.budget = budget;
  std::map<Partition, HomMap> by_kernel;
  for (auto& h : homomorphisms(B, A, opts)) {
    Partition k = h.kernel();
    if (kappa.leq(k)) by_kernel.emplace(std::move(k), std::move(h));
  }
  std::vector<const HomMap*> minimal;
  std::vector<Partition> kernels;
  for (const auto& [k, h] : by_kernel) {
    bool is_min = true;
    for (const auto& [other, unused] : by_kernel)
      if (other != k && other.leq(k)) {
        is_min = false;
        break;
      }
    if (is_min) {
      minimal.push_back(&h);
      kernels.push_back(k);
    }
  }
  Partition all = Partition::full(B.size());
  for (const auto& k : kernels) all = all.meet(k);
  if (all != kappa) return std::nullopt;

  const std::size_t m = kernels.size();
  std::size_t visited = 0;
  QEmbedding out;
  for (std::size_t r = 0; r <= std::min(m, kExactPowerBound); ++r) {
    const bool found = for_each_combination(m, r, budget, visited, [&](const std::vector<std::size_t>& pick) {
      Partition k = Partition::full(B.size());
      for (std::size_t i : pick) k = k.meet(kernels[i]);
      if (k != kappa) return false;
      for (std::size_t i : pick) out.maps.push_back(*minimal[i]);
      return true;
    });
    if (found) return out;
  }
  // Greedy cover: each step takes the kernel that leaves the fewest unseparated pairs.
  out.minimal = false;
  Partition cur = Partition::full(B.size());
  std::vector<bool> used(m, false);
  while (cur != kappa) {
    std::size_t best = m, best_blocks = cur.num_blocks();
    for (std::size_t i = 0; i < m; ++i) {
      if (used[i]) continue;
      const std::size_t b = cur.meet(kernels[i]).num_blocks();
      if (b > best_blocks) {
        best = i;
        best_blocks = b;
      }
    }
    if (best == m) throw std::logic_error("greedy cover stalled");
    used[best] = true;
    cur = cur.meet(kernels[best]);
    out.maps.push_back(*minimal[best]);
  }
  return out;
}

SplitConditions verify_splitting(const Algebra& A, const CommutatorTable& T, const RelevantTriple& t,
                                 const SplittingTriple& s) {
  const Algebra& B = T.algebra();
  SplitConditions c;
  // Recomputed from partitions and tables rather than the lattice caches.
  const Partition& alpha = T[s.alpha];
  const Partition& beta = T[s.beta];
  const Partition& kappa = T[s.kappa];
  bool maps_ok = true;
  for (const auto& h : s.embedding.maps) {
    if (h.source.size() != B.size() || !(h.target == A) || h.image.size() != B.size() ||
        !is_homomorphism(B, A, h.image) || !kappa.leq(h.kernel())) {
      maps_ok = false;
      break;
    }
  }
  c.q_congruence = maps_ok && joint_kernel(B.size(), s.embedding.maps) == kappa;
  c.beta_below_delta = beta.leq(T[t.delta]);
  c.meet_is_kappa = alpha.meet(beta) == kappa;
  c.join_is_nu = congruence_generated(B, alpha.join(beta)) == T[t.nu];
  c.alpha_abelian_mod_kappa = commutator(B, alpha, alpha).leq(kappa);
  return c;
}

std::optional<SplittingTriple> find_splitting_triple(const Algebra& A, const CommutatorTable& T,
                                                     const RelevantTriple& t, const CmGuard& guard,
                                                     const Budget& budget) {
  QCache cache{A, T, budget, {}};
  const auto& L = T.lattice();
  if (auto s = try_candidate(A, T, t, cache, t.nu, t.delta, t.delta, "nu-delta-delta")) return s;

  const std::size_t zeta = T.center(guard);
  const std::size_t derived = T.comm(T.top(), T.top());
  if (auto s = try_candidate(A, T, t, cache, zeta, derived, T.bottom(), "center-derived")) return s;

  for (std::size_t gamma : L.upper_covers(zeta)) {
    if (L.leq(gamma, t.delta)) continue;
    if (auto s = try_candidate(A, T, t, cache, L.meet(gamma, derived), t.delta, T.bottom(), "atom-above-center"))
      return s;
  }

  HomSearchOptions opts;
  opts.budget = budget;
  std::set<std::size_t> seen;
  const std::size_t nu_derived = T.comm(t.nu, t.nu);
  for (const auto& eps : homomorphisms(T.algebra(), T.algebra(), opts)) {
    const auto k = L.find(eps.kernel());
    if (!k || !seen.insert(*k).second) continue;
    if (!L.leq(nu_derived, *k) || !L.leq(*k, t.delta)) continue;
    if (auto s = try_candidate(A, T, t, cache, t.nu, *k, *k, "endomorphism-kernel")) return s;
  }

  std::size_t visited = 0;
  for (std::size_t a = 0; a < T.size(); ++a)
    for (std::size_t b = 0; b < T.size(); ++b)
      for (std::size_t k = 0; k < T.size(); ++k) {
        budget.charge(++visited, "splitting triple search");
        if (auto s = try_candidate(A, T, t, cache, a, b, k, "exhaustive")) return s;
      }
  return std::nullopt;
}

std::vector<SplittingTriple> all_splitting_triples(const Algebra& A, const CommutatorTable& T,
                                                   const RelevantTriple& t, const Budget& budget) {
  QCache cache{A, T, budget, {}};
  std::vector<SplittingTriple> out;
  std::size_t visited = 0;
  for (std::size_t a = 0; a < T.size(); ++a)
    for (std::size_t b = 0; b < T.size(); ++b)
      for (std::size_t k = 0; k < T.size(); ++k) {
        budget.charge(++visited, "splitting triple search");
        if (auto s = try_candidate(A, T, t, cache, a, b, k, "exhaustive")) out.push_back(std::move(*s));
      }
  return out;
}

bool SplitLedger::pass() const { return first_failure() == nullptr; }

const SplitEntry* SplitLedger::first_failure() const {
  for (const auto& e : entries)
    if (!e.split) return &e;
  return nullptr;
}

SplitLedger split_centralizer_condition(const Algebra& A, const CmGuard& guard, const Budget& budget) {
  SplitLedger ledger;
  for (const auto& U : subalgebras(A, budget)) {
    Subpower S = make_subpower(A, U, A.name() + U.to_string(), budget);
    const auto T = CommutatorTable::compute(S.algebra, budget);
    for (const auto& t : relevant_triples(T, guard)) {
      SplitEntry e;
      e.subalgebra = S;
      e.triple = t;
      e.delta = T[t.delta];
      e.theta = T[t.theta];
      e.nu = T[t.nu];
      e.split = find_splitting_triple(A, T, t, guard, budget);
      for (const auto& s : all_splitting_triples(A, T, t, budget)) {
        if (!e.least_power || s.embedding.power() < *e.least_power) {
          e.least_power = s.embedding.power();
          e.least_power_exact = s.embedding.minimal;
        }
      }
      ledger.entries.push_back(std::move(e));
    }
  }
  return ledger;
}

Constants constants(const Algebra& A, std::size_t k, const SplitLedger& ledger, const Budget& budget) {
  if (const auto* f = ledger.first_failure())
    throw HypothesisError("split centralizer condition fails at delta=" + f->delta.to_string() + " on subalgebra " +
                          f->subalgebra.universe.to_string());
  Constants c;
  c.index_base = A.size();
  if (ledger.entries.empty()) {
    c.degenerate = true;
    c.index_bound = 1;
    c.arity_bound = std::max<std::size_t>(2, k > 0 ? k - 1 : 0);
    c.notes.push_back("no relevant triples: a = s = 0, i = 1, p = 1, e = 1");
    return c;
  }
  std::set<std::pair<Relation, Partition>> sections;
  for (const auto& e : ledger.entries) {
    const auto Q = quotient(e.subalgebra.algebra, e.nu);
    c.automorphisms = std::max(c.automorphisms, automorphisms(Q.algebra, budget).size());
    sections.emplace(e.subalgebra.universe, e.delta);
    if (e.least_power) {
      c.power = std::max(c.power, *e.least_power);
      if (!e.least_power_exact) c.power_is_upper_bound = true;
    }
  }
  c.sections = sections.size();
  c.index_exponent = c.automorphisms * c.sections;
  c.index_bound = power_u64(c.index_base, c.index_exponent);
  if (!c.index_bound) c.notes.push_back("index bound does not fit in 64 bits");
  if (c.power_is_upper_bound) c.notes.push_back("power is an upper bound from a greedy embedding");

  // e: lcm of class-group exponents over subalgebras of A^q (q <= p) isomorphic to a section of A.
  try {
    std::vector<Algebra> section_list;
    for (const auto& U : subalgebras(A, budget)) {
      const Subpower S = make_subpower(A, U, "", budget);
      const auto L = CongruenceLattice::compute(S.algebra, budget);
      for (std::size_t j = 0; j < L.size(); ++j) section_list.push_back(quotient(S.algebra, L[j]).algebra);
    }
    std::size_t e = 1;
    std::size_t modules = 0;
    for (std::size_t q = 1; q <= c.power; ++q) {
      std::vector<Relation> candidates =
          q == 1 ? subalgebras(A, budget) : subuniverses_between(A, Relation(q), Relation::full(A.size(), q), budget);
      for (const auto& U : candidates) {
        if (U.empty() || U.size() > A.size()) continue;
        const Subpower M = make_subpower(A, U, "", budget);
        if (q > 1) {
          bool section = false;
          for (const auto& X : section_list)
            if (X.size() == M.algebra.size() && isomorphism(M.algebra, X, budget)) {
              section = true;
              break;
            }
          if (!section) continue;
        }
        const auto T = CommutatorTable::compute(M.algebra, budget);
        for (std::size_t j = 0; j < T.size(); ++j) {
          if (j == T.bottom() || T.comm(j, j) != T.bottom()) continue;
          const auto d = find_difference_term(A, {{M.algebra, T[j]}}, budget);
          if (!d) {
            c.notes.push_back("no difference term for alpha=" + T[j].to_string() + " on " + U.to_string());
            continue;
          }
          ++modules;
          for (const auto& block : T[j].blocks()) {
            const auto G = class_group(M.algebra, T[j], block.front(), d->term.derivation, budget);
            e = std::lcm(e, G.exponent());
          }
        }
      }
    }
    c.exponent = e;
    c.notes.push_back("e from " + std::to_string(modules) + " abelian congruences of powers up to " +
                      std::to_string(c.power));
  } catch (const BudgetExceeded& ex) {
    c.exponent_is_lower_bound = true;
    c.notes.push_back(std::string("exponent is a lower bound: ") + ex.what());
  }
  c.arity_bound = std::max(1 + c.power, k > 0 ? k - 1 : 0);
  return c;
}

const char* si_class_name(SiClass c) {
  switch (c) {
    case SiClass::Abelian: return "abelian";
    case SiClass::Neutral: return "neutral";
    case SiClass::AlmostNeutral: return "almost_neutral";
    case SiClass::Other: return "other";
  }
  return "?";
}

SiClass classify_si(const Algebra& S, const CmGuard& guard, const Budget& budget) {
  if (S.size() < 2) throw std::invalid_argument("a one-element algebra is not subdirectly irreducible");
  const auto T = CommutatorTable::compute(S, budget);
  const auto mu = T.lattice().monolith();
  if (!mu) throw std::invalid_argument("algebra is not subdirectly irreducible");
  if (T.comm(T.top(), T.top()) == T.bottom()) return SiClass::Abelian;
  if (check_identity(T, Identity::C3).holds) return SiClass::Neutral;
  if (T.centralizer(T.bottom(), *mu, guard) == *mu && is_neutral_interval(T, *mu, T.top()))
    return SiClass::AlmostNeutral;
  return SiClass::Other;
}

SolvableC8Factorization solvable_c8_factorization(const Algebra& A, const CmGuard& guard, const Budget& budget) {
  SolvableC8Factorization f;
  bool abelian_or_c8 = true;
  f.applicable = true;
  for (const auto& U : subalgebras(A, budget)) {
    const Subpower S = make_subpower(A, U, "", budget);
    const auto T = CommutatorTable::compute(S.algebra, budget);
    for (std::size_t d : T.lattice().meet_irreducibles()) {
      const bool c8 = c8_quotient(T, d);
      if (!c8 && !abelian_quotient(T, d)) abelian_or_c8 = false;
      if (!c8 && !solvable_quotient(T, d) && f.applicable) {
        f.applicable = false;
        f.inapplicable_reason = "section " + U.to_string() + "/" + T[d].to_string() + " is neither solvable nor C8";
      }
    }
  }
  const auto T = CommutatorTable::compute(A, budget);
  const auto& L = T.lattice();
  std::size_t sigma = T.top(), rho = T.top();
  for (std::size_t x = 0; x < T.size(); ++x) {
    if (solvable_quotient(T, x)) sigma = L.meet(sigma, x);
    if (c8_quotient(T, x)) rho = L.meet(rho, x);
  }
  f.sigma = T[sigma];
  f.rho = T[rho];
  if (f.applicable && !solvable_quotient(T, sigma)) {
    f.applicable = false;
    f.inapplicable_reason = "no least congruence with solvable quotient";
  }
  if (f.applicable && !c8_quotient(T, rho)) {
    f.applicable = false;
    f.inapplicable_reason = "no least congruence with C8 quotient";
  }
  f.complementary = f.sigma.meet(f.rho).is_identity() && congruence_generated(A, f.sigma.join(f.rho)).is_full();
  f.permuting = permutes(f.sigma, f.rho);
  f.product_congruences = true;
  for (std::size_t x = 0; x < T.size(); ++x) {
    const Partition& chi = T[x];
    const Partition lhs = congruence_generated(A, chi.join(f.sigma)).meet(congruence_generated(A, chi.join(f.rho)));
    if (lhs != chi) f.product_congruences = false;
  }
  if (abelian_or_c8) f.derived_and_center = sigma == T.comm(T.top(), T.top()) && rho == T.center(guard);
  return f;
}

bool sylow_abelian_check(const Algebra& G) {
  std::optional<std::size_t> mul;
  for (std::size_t i = 0; i < G.num_ops(); ++i)
    if (G.op(i).arity == 2) {
      mul = i;
      break;
    }
  if (!mul) throw std::invalid_argument("no binary operation");
  const std::size_t n = G.size();
  auto m = [&](Elem x, Elem y) { return G.apply(*mul, {x, y}); };
  std::optional<Elem> id;
  for (std::size_t e = 0; e < n && !id; ++e) {
    bool ok = true;
    for (std::size_t x = 0; x < n && ok; ++x)
      ok = m(Elem(e), Elem(x)) == x && m(Elem(x), Elem(e)) == x;
    if (ok) id = Elem(e);
  }
  if (!id) throw std::invalid_argument("binary operation has no identity");
  for (std::size_t x = 0; x < n; ++x) {
    bool inv = false;
    for (std::size_t y = 0; y < n && !inv; ++y) inv = m(Elem(x), Elem(y)) == *id && m(Elem(y), Elem(x)) == *id;
    if (!inv) throw std::invalid_argument("element " + std::to_string(x) + " has no inverse");
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t z = 0; z < n; ++z)
        if (m(m(Elem(x), Elem(y)), Elem(z)) != m(Elem(x), m(Elem(y), Elem(z))))
          throw std::invalid_argument("binary operation is not associative");
  }

  auto generated = [&](std::vector<Elem> gens) {
    std::vector<bool> in(n, false);
    std::vector<Elem> members{*id};
    in[*id] = true;
    for (std::size_t i = 0; i < members.size(); ++i)
      for (Elem g : gens) {
        const Elem y = m(members[i], g);
        if (!in[y]) {
          in[y] = true;
          members.push_back(y);
        }
      }
    std::sort(members.begin(), members.end());
    return members;
  };

  std::size_t rest = n;
  for (std::size_t p = 2; rest > 1; ++p) {
    if (rest % p != 0) continue;
    std::size_t full = 1;
    while (rest % p == 0) {
      rest /= p;
      full *= p;
    }
    // A p-subgroup that no p-element extends is a Sylow p-subgroup.
    std::vector<Elem> H{*id};
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t g = 0; g < n && !grew; ++g) {
        if (std::binary_search(H.begin(), H.end(), Elem(g))) continue;
        auto gens = H;
        gens.push_back(Elem(g));
        auto K = generated(gens);
        if (is_prime_power_of(K.size(), p)) {
          H = std::move(K);
          grew = true;
        }
      }
    }
    if (H.size() != full) throw std::logic_error("maximal p-subgroup has the wrong order");
    for (Elem x : H)
      for (Elem y : H)
        if (m(x, y) != m(y, x)) return false;
  }
  return true;
}

const char* verdict_name(Verdict v) { return v == Verdict::Dualizable ? "DUALIZABLE" : "UNKNOWN"; }

DualizabilityReport dualizability_report(const Algebra& A, std::size_t k_max, const Budget& budget) {
  DualizabilityReport r;
  const auto w = least_parallelogram_term(A, k_max, budget);
  if (!w) {
    r.evidence.push_back("no parallelogram term with k <= " + std::to_string(k_max));
    return r;
  }
  r.parallelogram_k = w->k;
  r.evidence.push_back("parallelogram term with k = " + std::to_string(w->k));
  const CmGuard guard = cm_guard(*w);

  r.ledger = split_centralizer_condition(A, guard, budget);
  r.evidence.push_back(std::to_string(r.ledger->entries.size()) + " relevant triples over all subalgebras");
  for (const auto& e : r.ledger->entries) {
    if (!e.split)
      r.evidence.push_back("unsplit relevant triple (delta=" + e.delta.to_string() + ", theta=" +
                           e.theta.to_string() + ", nu=" + e.nu.to_string() + ") on subalgebra " +
                           e.subalgebra.universe.to_string());
  }
  if (r.ledger->pass()) {
    r.evidence.push_back("split centralizer condition holds");
    r.constants = constants(A, w->k, *r.ledger, budget);
  } else {
    r.evidence.push_back("split centralizer condition fails");
  }

  for (const auto& U : subalgebras(A, budget)) {
    const Subpower S = make_subpower(A, U, "", budget);
    const auto L = CongruenceLattice::compute(S.algebra, budget);
    for (std::size_t d : L.meet_irreducibles()) {
      const auto Q = quotient(S.algebra, L[d]);
      r.si_sections.emplace_back(U.to_string() + "/" + L[d].to_string(), classify_si(Q.algebra, guard, budget));
    }
  }

  const auto rs = residual_smallness_test(A, guard, budget);
  r.residually_small = rs.c1_in_all_subalgebras;
  r.evidence.push_back(r.residually_small ? "C1 holds in every subalgebra" : "C1 fails in some subalgebra");
  if (r.ledger->pass()) r.verdict = Verdict::Dualizable;
  return r;
}

}  // namespace algwb
