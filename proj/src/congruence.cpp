#include "algwb/congruence.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace algwb {

bool is_congruence(const Algebra& A, const Partition& theta) {
  if (theta.size() != A.size()) return false;
  const std::size_t n = A.size();
  std::vector<Elem> args;
  for (std::size_t o = 0; o < A.num_ops(); ++o) {
    const std::size_t r = A.op(o).arity;
    if (r == 0) continue;
    args.assign(r, 0);
    // f(args) ~ f(args with position i replaced by its block representative)
    while (true) {
      const Elem v = A.apply(o, args);
      for (std::size_t i = 0; i < r; ++i) {
        const Elem keep = args[i];
        args[i] = theta.rep(keep);
        const bool ok = theta.related(v, A.apply(o, args));
        args[i] = keep;
        if (!ok) return false;
      }
      std::size_t j = r;
      while (j > 0 && ++args[j - 1] == n) args[--j] = 0;
      if (j == 0) break;
    }
  }
  return true;
}

Partition congruence_generated(const Algebra& A, std::span<const std::pair<Elem, Elem>> pairs) {
  const std::size_t n = A.size();
  UnionFind uf(n);
  std::deque<std::pair<Elem, Elem>> work;
  for (auto [a, b] : pairs) {
    if (a >= n || b >= n) throw std::invalid_argument("pair element out of range");
    if (uf.unite(a, b)) work.emplace_back(a, b);
  }
  std::vector<Elem> args;
  while (!work.empty()) {
    const auto [x, y] = work.front();
    work.pop_front();
    for (std::size_t o = 0; o < A.num_ops(); ++o) {
      const std::size_t r = A.op(o).arity;
      if (r == 0) continue;
      for (std::size_t pos = 0; pos < r; ++pos) {
        args.assign(r, 0);
        while (true) {
          args[pos] = x;
          const Elem u = A.apply(o, args);
          args[pos] = y;
          const Elem v = A.apply(o, args);
          if (uf.unite(u, v)) work.emplace_back(u, v);
          // odometer over positions other than pos
          std::size_t j = r;
          bool done = true;
          while (j > 0) {
            --j;
            if (j == pos) continue;
            if (++args[j] < n) {
              done = false;
              break;
            }
            args[j] = 0;
          }
          if (done) break;
        }
      }
    }
  }
  return Partition::from_union_find(uf);
}

Partition congruence_generated(const Algebra& A, const Partition& theta) {
  std::vector<std::pair<Elem, Elem>> pairs;
  for (std::size_t x = 0; x < theta.size(); ++x)
    if (theta.rep(x) != x) pairs.emplace_back(theta.rep(x), static_cast<Elem>(x));
  return congruence_generated(A, pairs);
}

Partition principal_congruence(const Algebra& A, Elem a, Elem b) {
  const std::pair<Elem, Elem> p{a, b};
  return congruence_generated(A, std::span<const std::pair<Elem, Elem>>(&p, 1));
}

namespace {

bool lattice_order(const Partition& a, const Partition& b) {
  const auto na = a.num_blocks(), nb = b.num_blocks();
  if (na != nb) return na > nb;
  return a < b;
}

}  // namespace

CongruenceLattice CongruenceLattice::compute(const Algebra& A, const Budget& budget) {
  const std::size_t n = A.size();
  std::set<std::vector<Elem>> seen;
  std::vector<Partition> elems;
  std::vector<Partition> generators;
  auto add = [&](const Partition& p) {
    std::vector<Elem> key(p.labels().begin(), p.labels().end());
    if (seen.insert(key).second) {
      elems.push_back(p);
      budget.charge(elems.size(), "congruence lattice");
      return true;
    }
    return false;
  };
  add(Partition::identity(n));
  std::vector<Partition> principal_parts;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      Partition p = principal_congruence(A, static_cast<Elem>(a), static_cast<Elem>(b));
      principal_parts.push_back(p);
      add(p);
    }
  // join closure: each new element joined with every principal congruence
  for (std::size_t i = 0; i < elems.size(); ++i) {
    for (const auto& p : principal_parts) {
      Partition j = elems[i].join(p);
      add(j);
    }
  }
  std::sort(elems.begin(), elems.end(), lattice_order);

  CongruenceLattice L;
  L.elems_ = std::move(elems);
  const std::size_t m = L.elems_.size();
  for (std::size_t i = 0; i < m; ++i) {
    const auto lab = L.elems_[i].labels();
    L.index_.emplace(std::vector<Elem>(lab.begin(), lab.end()), i);
  }
  L.leq_.assign(m * m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) L.leq_[i * m + j] = L.elems_[i].leq(L.elems_[j]);
  L.meet_.assign(m * m, 0);
  L.join_.assign(m * m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      const std::size_t mt = L.index(L.elems_[i].meet(L.elems_[j]));
      const std::size_t jn = L.index(L.elems_[i].join(L.elems_[j]));
      L.meet_[i * m + j] = L.meet_[j * m + i] = mt;
      L.join_[i * m + j] = L.join_[j * m + i] = jn;
    }
  std::set<std::size_t> pr;
  for (const auto& p : principal_parts) pr.insert(L.index(p));
  L.principal_.assign(pr.begin(), pr.end());
  return L;
}

std::optional<std::size_t> CongruenceLattice::find(const Partition& p) const {
  const auto lab = p.labels();
  auto it = index_.find(std::vector<Elem>(lab.begin(), lab.end()));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t CongruenceLattice::index(const Partition& p) const {
  auto i = find(p);
  if (!i) throw std::invalid_argument("partition " + p.to_string() + " is not a congruence");
  return *i;
}

bool CongruenceLattice::covers(std::size_t lower, std::size_t upper) const {
  if (lower == upper || !leq(lower, upper)) return false;
  for (std::size_t k = 0; k < size(); ++k)
    if (k != lower && k != upper && leq(lower, k) && leq(k, upper)) return false;
  return true;
}

std::vector<std::size_t> CongruenceLattice::upper_covers(std::size_t a) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < size(); ++k)
    if (covers(a, k)) out.push_back(k);
  return out;
}

std::vector<std::size_t> CongruenceLattice::lower_covers(std::size_t a) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < size(); ++k)
    if (covers(k, a)) out.push_back(k);
  return out;
}

std::vector<std::size_t> CongruenceLattice::meet_irreducibles() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < size(); ++k)
    if (upper_covers(k).size() == 1) out.push_back(k);
  return out;
}

std::optional<std::size_t> CongruenceLattice::monolith() const {
  auto atoms = upper_covers(bottom());
  if (atoms.size() != 1) return std::nullopt;
  return atoms[0];
}

bool saturates(const Relation& R, std::size_t coord, const Partition& theta) {
  std::vector<Elem> t;
  for (std::size_t i = 0; i < R.size(); ++i) {
    t = R.tuple(i);
    const Elem orig = t[coord];
    for (Elem y : theta.block_of(orig)) {
      t[coord] = y;
      if (!R.contains(t)) return false;
    }
  }
  return true;
}

std::vector<std::pair<Elem, Elem>> compose(const Partition& a, const Partition& b) {
  std::set<std::pair<Elem, Elem>> out;
  const std::size_t n = a.size();
  for (std::size_t x = 0; x < n; ++x)
    for (Elem y : a.block_of(x))
      for (Elem z : b.block_of(y)) out.emplace(static_cast<Elem>(x), z);
  return {out.begin(), out.end()};
}

bool permutes(const Partition& a, const Partition& b) { return compose(a, b) == compose(b, a); }

}  // namespace algwb
