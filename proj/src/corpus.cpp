#include "algwb/corpus.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace algwb::corpus {

Algebra group_from_table(std::string name, std::size_t n, const std::function<Elem(Elem, Elem)>& mul) {
  Operation m{"*", 2, std::vector<Elem>(n * n)};
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) m.table[a * n + b] = mul(static_cast<Elem>(a), static_cast<Elem>(b));
  std::size_t e = n;
  for (std::size_t c = 0; c < n && e == n; ++c) {
    bool id = true;
    for (std::size_t a = 0; a < n && id; ++a) id = m.table[c * n + a] == a && m.table[a * n + c] == a;
    if (id) e = c;
  }
  if (e == n) throw std::invalid_argument("table has no identity");
  Operation inv{"inv", 1, std::vector<Elem>(n, 0)};
  for (std::size_t a = 0; a < n; ++a) {
    bool found = false;
    for (std::size_t b = 0; b < n && !found; ++b)
      if (m.table[a * n + b] == e) {
        inv.table[a] = static_cast<Elem>(b);
        found = true;
      }
    if (!found) throw std::invalid_argument("table has no inverses");
  }
  Operation unit{"e", 0, {static_cast<Elem>(e)}};
  return Algebra(std::move(name), n, {std::move(m), std::move(inv), std::move(unit)});
}

namespace {

Algebra additive(std::string name, std::size_t n, const std::function<Elem(Elem, Elem)>& add, Elem zero) {
  Operation plus{"+", 2, std::vector<Elem>(n * n)};
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) plus.table[a * n + b] = add(static_cast<Elem>(a), static_cast<Elem>(b));
  Operation neg{"-", 1, std::vector<Elem>(n)};
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (plus.table[a * n + b] == zero) neg.table[a] = static_cast<Elem>(b);
  Operation z{"0", 0, {zero}};
  return Algebra(std::move(name), n, {std::move(plus), std::move(neg), std::move(z)});
}

using Perm = std::array<int, 3>;

std::vector<Perm> s3_elements() {
  std::vector<Perm> v;
  Perm p{0, 1, 2};
  do v.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return v;
}

}  // namespace

Algebra cyclic_group(std::size_t n) {
  return additive("Z" + std::to_string(n), n, [n](Elem a, Elem b) { return static_cast<Elem>((a + b) % n); }, 0);
}

Algebra klein_group() {
  Algebra g = abelian_product(2, 2);
  return g.renamed("Z2xZ2");
}

Algebra abelian_product(std::size_t a, std::size_t b) {
  return additive("Z" + std::to_string(a) + "xZ" + std::to_string(b), a * b,
                  [a, b](Elem x, Elem y) {
                    const std::size_t i = (x / b + y / b) % a, j = (x % b + y % b) % b;
                    return static_cast<Elem>(i * b + j);
                  },
                  0);
}

Algebra symmetric_group3() {
  const auto el = s3_elements();
  return group_from_table("S3", 6, [el](Elem x, Elem y) {
    Perm c{};
    for (int i = 0; i < 3; ++i) c[i] = el[x][el[y][i]];
    return static_cast<Elem>(std::find(el.begin(), el.end(), c) - el.begin());
  });
}

Algebra with_all_constants(const Algebra& A) {
  std::vector<Operation> ops(A.ops().begin(), A.ops().end());
  for (std::size_t c = 0; c < A.size(); ++c) ops.push_back(Operation{"c" + std::to_string(c), 0, {static_cast<Elem>(c)}});
  return Algebra(A.name() + "+consts", A.size(), std::move(ops));
}

Algebra symmetric_group3_with_constants() { return with_all_constants(symmetric_group3()).renamed("S3c"); }

Algebra dihedral_group4() {
  // r^i s^j * r^k s^l = r^(i + (-1)^j k) s^(j + l)
  return group_from_table("D4", 8, [](Elem x, Elem y) {
    const int i = x / 2, j = x % 2, k = y / 2, l = y % 2;
    const int ri = ((i + (j ? -k : k)) % 4 + 4) % 4;
    return static_cast<Elem>(ri * 2 + (j + l) % 2);
  });
}

Algebra two_element_lattice() {
  Operation meet{"meet", 2, {0, 0, 0, 1}};
  Operation join{"join", 2, {0, 1, 1, 1}};
  return Algebra("L2", 2, {meet, join});
}

Algebra two_element_semilattice() { return Algebra("SL2", 2, {Operation{"meet", 2, {0, 0, 0, 1}}}); }

Algebra trivial_algebra() { return Algebra("T1", 1, {}); }

Algebra trivial_group() { return cyclic_group(1).renamed("Z1"); }

Partition s3_alternating_partition() {
  const auto el = s3_elements();
  std::vector<int> sign(6);
  for (std::size_t x = 0; x < 6; ++x) {
    int inv = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) inv += el[x][i] > el[x][j];
    sign[x] = inv % 2;
  }
  return Partition::from_labels(std::span<const int>(sign));
}

}  // namespace algwb::corpus
