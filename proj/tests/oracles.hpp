#pragma once
// Brute-force reference implementations. Deliberately naive and independent
// of the library algorithms they check.

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "algwb/algebra.hpp"
#include "algwb/partition.hpp"
#include "algwb/relation.hpp"
#include "algwb/terms.hpp"

namespace oracle {

using algwb::Algebra;
using algwb::Elem;
using algwb::Partition;
using algwb::Relation;

inline void for_each_tuple(std::size_t n, std::size_t r, const std::function<void(const std::vector<Elem>&)>& f) {
  std::vector<Elem> t(r, 0);
  if (n == 0) return;
  while (true) {
    f(t);
    std::size_t i = r;
    while (i > 0) {
      if (++t[i - 1] < n) break;
      t[i - 1] = 0;
      --i;
    }
    if (i == 0) return;
  }
}

inline Elem apply(const Algebra& A, std::size_t o, const std::vector<Elem>& args) {
  std::size_t idx = 0;
  for (Elem a : args) idx = idx * A.size() + a;
  return A.op(o).table[idx];
}

/// Compatibility by checking every pair of argument tuples.
inline bool compatible_partition(const Algebra& A, const Partition& p) {
  for (std::size_t o = 0; o < A.num_ops(); ++o) {
    const std::size_t r = A.op(o).arity;
    bool ok = true;
    for_each_tuple(A.size(), r, [&](const std::vector<Elem>& x) {
      if (!ok) return;
      for_each_tuple(A.size(), r, [&](const std::vector<Elem>& y) {
        if (!ok) return;
        for (std::size_t i = 0; i < r; ++i)
          if (!p.related(x[i], y[i])) return;
        if (!p.related(apply(A, o, x), apply(A, o, y))) ok = false;
      });
    });
    if (!ok) return false;
  }
  return true;
}

/// Every set partition of [0,n) via restricted growth strings.
inline std::vector<Partition> all_partitions(std::size_t n) {
  std::vector<Partition> out;
  std::vector<int> a(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int mx) {
    if (i == n) {
      out.push_back(Partition::from_labels(std::span<const int>(a)));
      return;
    }
    for (int v = 0; v <= mx + 1; ++v) {
      a[i] = v;
      rec(i + 1, std::max(mx, v));
    }
  };
  if (n == 0) return out;
  a[0] = 0;
  rec(1, 0);
  return out;
}

inline std::vector<Partition> all_congruences(const Algebra& A) {
  std::vector<Partition> out;
  for (const auto& p : all_partitions(A.size()))
    if (compatible_partition(A, p)) out.push_back(p);
  return out;
}

/// Least congruence containing (a,b): meet of all congruences that contain it.
inline Partition least_congruence_containing(const Algebra& A, Elem a, Elem b) {
  Partition best = Partition::full(A.size());
  for (const auto& p : all_congruences(A))
    if (p.related(a, b)) best = best.meet(p);
  return best;
}

/// Naive fixpoint: apply every operation to every argument tuple until stable.
inline std::set<std::vector<Elem>> naive_closure(const Algebra& A, std::set<std::vector<Elem>> s, std::size_t width) {
  for (std::size_t o = 0; o < A.num_ops(); ++o)
    if (A.op(o).arity == 0) s.insert(std::vector<Elem>(width, A.op(o).table[0]));
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::vector<Elem>> cur(s.begin(), s.end());
    for (std::size_t o = 0; o < A.num_ops(); ++o) {
      const std::size_t r = A.op(o).arity;
      if (r == 0) continue;
      for_each_tuple(cur.size(), r, [&](const std::vector<Elem>& pick) {
        std::vector<Elem> out(width);
        for (std::size_t c = 0; c < width; ++c) {
          std::vector<Elem> col(r);
          for (std::size_t j = 0; j < r; ++j) col[j] = cur[pick[j]][c];
          out[c] = apply(A, o, col);
        }
        if (s.insert(out).second) changed = true;
      });
    }
  }
  return s;
}

inline std::vector<std::vector<Elem>> all_homomorphisms(const Algebra& S, const Algebra& T) {
  std::vector<std::vector<Elem>> out;
  for_each_tuple(T.size(), S.size(), [&](const std::vector<Elem>& f) {
    for (std::size_t o = 0; o < S.num_ops(); ++o) {
      bool ok = true;
      for_each_tuple(S.size(), S.op(o).arity, [&](const std::vector<Elem>& x) {
        if (!ok) return;
        std::vector<Elem> fx(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) fx[i] = f[x[i]];
        if (f[apply(S, o, x)] != apply(T, o, fx)) ok = false;
      });
      if (!ok) return;
    }
    out.push_back(f);
  });
  return out;
}

/// Random algebra on n elements with one binary and one unary operation.
inline Algebra random_algebra(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<int> d(0, static_cast<int>(n) - 1);
  algwb::Operation b{"b", 2, std::vector<Elem>(n * n)};
  algwb::Operation u{"u", 1, std::vector<Elem>(n)};
  for (auto& v : b.table) v = static_cast<Elem>(d(rng));
  for (auto& v : u.table) v = static_cast<Elem>(d(rng));
  return Algebra("rnd", n, {b, u});
}

inline Partition random_partition(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<int> d(0, static_cast<int>(n) - 1);
  std::vector<int> lab(n);
  for (auto& l : lab) l = d(rng);
  return Partition::from_labels(std::span<const int>(lab));
}

// Random term of depth at most `depth` over variables [0, vars).
inline algwb::Term random_term(std::mt19937& rng, const Algebra& A, std::size_t vars, std::size_t depth) {
  algwb::Term t;
  t.arity = vars;
  auto build = [&](auto&& self, std::size_t left) -> std::size_t {
    std::uniform_int_distribution<std::size_t> coin(0, 2);
    if (left == 0 || A.num_ops() == 0 || coin(rng) == 0) {
      t.nodes.push_back(algwb::Term::Node{algwb::Term::Node::kVariable, std::uniform_int_distribution<std::size_t>(0, vars - 1)(rng), {}});
      return t.nodes.size() - 1;
    }
    const std::size_t op = std::uniform_int_distribution<std::size_t>(0, A.num_ops() - 1)(rng);
    algwb::Term::Node nd;
    nd.op = static_cast<std::int32_t>(op);
    for (std::size_t a = 0; a < A.op(op).arity; ++a) nd.args.push_back(self(self, left - 1));
    t.nodes.push_back(std::move(nd));
    return t.nodes.size() - 1;
  };
  build(build, depth);
  return t;
}

/// Least congruence delta with C(alpha, beta; delta): for every matrix
/// [[x, y], [z, w]] in the subalgebra of A^4 generated by (a, a, b, b) for
/// a alpha b and (c, d, c, d) for c beta d, x delta y implies z delta w.
inline Partition term_condition_commutator(const Algebra& A, const Partition& alpha, const Partition& beta) {
  std::set<std::vector<Elem>> gens;
  for (Elem a = 0; a < A.size(); ++a)
    for (Elem b = 0; b < A.size(); ++b) {
      if (alpha.related(a, b)) gens.insert({a, a, b, b});
      if (beta.related(a, b)) gens.insert({a, b, a, b});
    }
  const auto M = naive_closure(A, gens, 4);
  Partition best = Partition::full(A.size());
  for (const auto& delta : all_congruences(A)) {
    bool ok = true;
    for (const auto& m : M)
      if (delta.related(m[0], m[1]) && !delta.related(m[2], m[3])) {
        ok = false;
        break;
      }
    if (ok) best = best.meet(delta);
  }
  return best;
}

/// Table of a (k+3)-ary operation against the parallelogram matrix, written out
/// entry by entry: left block (x,x,y) on the first m rows and (y,x,x) below,
/// right block y off the diagonal and z on it, every row equal to y.
inline bool parallelogram_table_ok(const std::vector<Elem>& table, std::size_t size, std::size_t m, std::size_t n) {
  const std::size_t k = m + n;
  for (Elem x = 0; x < size; ++x)
    for (Elem y = 0; y < size; ++y)
      for (Elem z = 0; z < size; ++z)
        for (std::size_t row = 0; row < k; ++row) {
          std::vector<Elem> args;
          if (row < m) args = {x, x, y};
          else args = {y, x, x};
          for (std::size_t col = 0; col < k; ++col) args.push_back(col == row ? z : y);
          std::size_t idx = 0;
          for (Elem a : args) idx = idx * size + a;
          if (table.at(idx) != y) return false;
        }
  return true;
}

/// Every ternary term operation of A as a table indexed by x*n*n + y*n + z.
inline std::set<std::vector<Elem>> ternary_clone(const Algebra& A) {
  const std::size_t n = A.size(), w = n * n * n;
  std::set<std::vector<Elem>> proj;
  for (std::size_t v = 0; v < 3; ++v) {
    std::vector<Elem> t(w);
    for (std::size_t c = 0; c < w; ++c) t[c] = static_cast<Elem>(v == 0 ? c / (n * n) : v == 1 ? c / n % n : c % n);
    proj.insert(t);
  }
  return naive_closure(A, proj, w);
}

inline bool closed_set(const Algebra& A, const std::set<std::vector<Elem>>& s, std::size_t width) {
  return naive_closure(A, s, width) == s;
}

/// Definition-level irreducibility: some tuple outside rho lies in every
/// proper compatible extension of rho. A^n has no proper extension and is
/// reported as irreducible. Only for tiny powers.
inline bool irreducible_by_extensions(const Algebra& A, const Relation& rho) {
  const std::size_t r = rho.arity();
  std::vector<std::vector<Elem>> outside;
  for_each_tuple(A.size(), r, [&](const std::vector<Elem>& t) {
    if (!rho.contains(t)) outside.push_back(t);
  });
  if (outside.empty()) return true;
  std::vector<char> in_all(outside.size(), 1);
  for (std::size_t mask = 1; mask < (std::size_t{1} << outside.size()); ++mask) {
    std::set<std::vector<Elem>> s;
    for (std::size_t i = 0; i < rho.size(); ++i) s.insert(rho.tuple(i));
    for (std::size_t i = 0; i < outside.size(); ++i)
      if (mask >> i & 1) s.insert(outside[i]);
    if (!closed_set(A, s, r)) continue;
    for (std::size_t i = 0; i < outside.size(); ++i)
      if (!(mask >> i & 1)) in_all[i] = 0;
  }
  return std::find(in_all.begin(), in_all.end(), 1) != in_all.end();
}

/// rho = {t : t|I in proj_I rho, t|J in proj_J rho} for some bipartition, by set comparison.
inline bool decomposable(const Relation& rho, std::size_t universe) {
  const std::size_t r = rho.arity();
  for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << r); ++mask) {
    std::vector<std::size_t> I, J;
    for (std::size_t c = 0; c < r; ++c) (mask >> c & 1 ? I : J).push_back(c);
    const Relation pi = rho.project(I), pj = rho.project(J);
    bool same = true;
    for_each_tuple(universe, r, [&](const std::vector<Elem>& t) {
      std::vector<Elem> a, b;
      for (auto c : I) a.push_back(t[c]);
      for (auto c : J) b.push_back(t[c]);
      if ((pi.contains(a) && pj.contains(b)) != rho.contains(t)) same = false;
    });
    if (same) return true;
  }
  return false;
}

/// Some map phi from proj_I(B) into B, a section of the projection, whose graph is closed.
inline bool retraction_by_search(const Algebra& A, const Relation& B, const std::vector<std::size_t>& I) {
  const Relation P = B.project(I);
  std::vector<std::vector<std::size_t>> choices(P.size());
  for (std::size_t t = 0; t < B.size(); ++t) {
    std::vector<Elem> key;
    for (auto c : I) key.push_back(B[t][c]);
    choices[*P.index_of(key)].push_back(t);
  }
  std::vector<std::size_t> pick(P.size(), 0);
  while (true) {
    std::set<std::vector<Elem>> graph;
    for (std::size_t i = 0; i < P.size(); ++i) {
      auto g = P.tuple(i);
      auto b = B.tuple(choices[i][pick[i]]);
      g.insert(g.end(), b.begin(), b.end());
      graph.insert(g);
    }
    if (closed_set(A, graph, I.size() + B.arity())) return true;
    std::size_t i = 0;
    while (i < P.size() && ++pick[i] == choices[i].size()) pick[i++] = 0;
    if (i == P.size()) return false;
  }
}

}  // namespace oracle
