#include "algwb/commutator.hpp"

#include <map>
#include <stdexcept>

#include "algwb/closure.hpp"

namespace algwb {

namespace {

Relation pairs_of(const Partition& p) {
  std::vector<Elem> flat;
  for (std::size_t x = 0; x < p.size(); ++x)
    for (Elem y : p.block_of(x)) {
      flat.push_back(static_cast<Elem>(x));
      flat.push_back(y);
    }
  return Relation(2, std::move(flat));
}

// Commutator using a prebuilt A(beta).
Partition commutator_on(const Algebra& A, const Subpower& Abeta, const Partition& alpha, const Partition& beta) {
  std::vector<std::pair<Elem, Elem>> gens;
  for (std::size_t a = 0; a < A.size(); ++a)
    for (Elem b : alpha.block_of(a)) {
      if (b == a) continue;
      const Elem aa[2] = {static_cast<Elem>(a), static_cast<Elem>(a)};
      const Elem bb[2] = {b, b};
      gens.emplace_back(static_cast<Elem>(Abeta.local(aa)), static_cast<Elem>(Abeta.local(bb)));
    }
  const Partition delta = congruence_generated(Abeta.algebra, gens);
  std::vector<std::pair<Elem, Elem>> rel;
  for (std::size_t x = 0; x < A.size(); ++x)
    for (Elem y : beta.block_of(x)) {
      const Elem xy[2] = {static_cast<Elem>(x), y};
      const Elem yy[2] = {y, y};
      if (delta.related(Abeta.local(xy), Abeta.local(yy))) rel.emplace_back(static_cast<Elem>(x), y);
    }
  // In modular varieties this set is already a congruence; closing it keeps
  // the result a congruence elsewhere too.
  return congruence_generated(A, rel);
}

void require_congruence(const Algebra& A, const Partition& p) {
  if (p.size() != A.size() || !is_congruence(A, p))
    throw std::invalid_argument("commutator argument is not a congruence");
}

}  // namespace

Partition commutator(const Algebra& A, const Partition& alpha, const Partition& beta, const Budget& budget) {
  require_congruence(A, alpha);
  require_congruence(A, beta);
  const Subpower Abeta = make_subpower(A, pairs_of(beta), "A(beta)", budget);
  return commutator_on(A, Abeta, alpha, beta);
}

CommutatorTable CommutatorTable::compute(const Algebra& A, const Budget& budget) {
  CommutatorTable T;
  T.algebra_ = A;
  T.lattice_ = CongruenceLattice::compute(A, budget);
  const std::size_t m = T.lattice_.size();
  budget.charge(m * m, "commutator table");
  T.table_.assign(m * m, 0);
  for (std::size_t b = 0; b < m; ++b) {
    const Partition& beta = T.lattice_[b];
    const Subpower Abeta = make_subpower(A, pairs_of(beta), "A(beta)", budget);
    for (std::size_t a = 0; a < m; ++a) T.table_[a * m + b] = T.lattice_.index(commutator_on(A, Abeta, T.lattice_[a], beta));
  }
  return T;
}

std::size_t CommutatorTable::centralizer(std::size_t beta, std::size_t alpha, const CmGuard&) const {
  std::size_t acc = bottom();
  for (std::size_t th : lattice_.principal())
    if (lattice_.leq(comm(alpha, th), beta)) acc = lattice_.join(acc, th);
  return acc;
}

Partition centralizer(const Algebra& A, const Partition& beta, const Partition& alpha, const CmGuard& guard) {
  const auto T = CommutatorTable::compute(A);
  return T[T.centralizer(T.index(beta), T.index(alpha), guard)];
}

Partition center(const Algebra& A, const CmGuard& guard) {
  const auto T = CommutatorTable::compute(A);
  return T[T.center(guard)];
}

const char* identity_name(Identity id) {
  switch (id) {
    case Identity::C1: return "C1";
    case Identity::C3: return "C3";
    case Identity::C8: return "C8";
  }
  return "?";
}

IdentityCheck check_identity(const CommutatorTable& T, Identity id) {
  const auto& L = T.lattice();
  const std::size_t m = T.size();
  IdentityCheck out;
  auto fail = [&](std::size_t x, std::size_t y) {
    out.holds = false;
    out.witness = std::make_pair(x, y);
  };
  for (std::size_t x = 0; x < m && out.holds; ++x) {
    if (id == Identity::C8) {
      if (T.comm(T.top(), x) != x) fail(x, x);
      continue;
    }
    for (std::size_t y = 0; y < m && out.holds; ++y) {
      if (id == Identity::C1) {
        if (T.comm(L.meet(x, y), y) != L.meet(x, T.comm(y, y))) fail(x, y);
      } else if (T.comm(x, y) != L.meet(x, y)) {
        fail(x, y);
      }
    }
  }
  return out;
}

bool is_abelian_interval(const CommutatorTable& T, std::size_t beta, std::size_t alpha) {
  if (!T.lattice().leq(beta, alpha)) throw std::invalid_argument("interval bounds out of order");
  return T.lattice().leq(T.comm(alpha, alpha), beta);
}

bool is_neutral_interval(const CommutatorTable& T, std::size_t beta, std::size_t alpha) {
  const auto& L = T.lattice();
  if (!L.leq(beta, alpha)) throw std::invalid_argument("interval bounds out of order");
  for (std::size_t g = 0; g < T.size(); ++g) {
    if (!L.leq(beta, g) || !L.leq(g, alpha)) continue;
    for (std::size_t e : L.upper_covers(g))
      if (L.leq(e, alpha) && L.leq(T.comm(e, e), g)) return false;
  }
  return true;
}

Series series(const CommutatorTable& T, const CmGuard& guard, const Budget& budget) {
  Series s;
  std::size_t cur = T.top();
  s.derived.push_back(T[cur]);
  while (true) {
    const std::size_t nxt = T.comm(cur, cur);
    if (nxt == cur) break;
    s.derived.push_back(T[nxt]);
    cur = nxt;
  }
  s.solvable = cur == T.bottom();

  cur = T.top();
  s.lower_central.push_back(T[cur]);
  while (true) {
    const std::size_t nxt = T.comm(T.top(), cur);
    if (nxt == cur) break;
    s.lower_central.push_back(T[nxt]);
    cur = nxt;
  }
  s.nilpotent = cur == T.bottom();

  // upper central series: zeta_{i+1} / zeta_i is the center of A / zeta_i
  const Algebra& A = T.algebra();
  Partition zeta = Partition::identity(A.size());
  s.upper_central.push_back(zeta);
  while (true) {
    const Quotient q = quotient(A, zeta);
    const auto Q = CommutatorTable::compute(q.algebra, budget);
    const Partition zq = Q[Q.center(guard)];
    const Partition next = pull_back(zq, q.natural.image);
    if (next == zeta) break;
    s.upper_central.push_back(next);
    zeta = next;
  }
  return s;
}

std::vector<RelevantTriple> relevant_triples(const CommutatorTable& T, const CmGuard& guard) {
  std::vector<RelevantTriple> out;
  const auto& L = T.lattice();
  for (std::size_t d : L.meet_irreducibles()) {
    const std::size_t th = L.upper_covers(d).front();
    if (!L.leq(T.comm(th, th), d)) continue;
    out.push_back({d, th, T.centralizer(d, th, guard)});
  }
  return out;
}

ResidualSmallness residual_smallness_test(const Algebra& A, const CmGuard& guard, const Budget& budget) {
  ResidualSmallness r;
  for (const auto& U : subalgebras(A, budget)) {
    const Subpower S = make_subpower(A, U, "", budget);
    const auto T = CommutatorTable::compute(S.algebra, budget);
    const auto c1 = check_identity(T, Identity::C1);
    if (!c1.holds) {
      r.c1_in_all_subalgebras = false;
      r.failures.push_back("C1 fails on subalgebra " + U.to_string());
    }
    for (const auto& t : relevant_triples(T, guard))
      if (!T.lattice().leq(T.comm(t.nu, t.nu), t.delta)) {
        r.nu_condition = false;
        r.failures.push_back("[nu,nu] not below delta=" + T[t.delta].to_string() + " on subalgebra " + U.to_string());
      }
  }
  return r;
}

}  // namespace algwb
