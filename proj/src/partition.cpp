#include "algwb/partition.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace algwb {

UnionFind::UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool UnionFind::unite(std::size_t x, std::size_t y) {
  x = find(x);
  y = find(y);
  if (x == y) return false;
  if (rank_[x] < rank_[y]) std::swap(x, y);
  parent_[y] = x;
  if (rank_[x] == rank_[y]) ++rank_[x];
  return true;
}

Partition::Partition(std::size_t n) : rep_(n) {
  if (n > kMaxUniverse + 1) throw std::invalid_argument("partition domain too large");
  for (std::size_t x = 0; x < n; ++x) rep_[x] = static_cast<Elem>(x);
}

Partition Partition::full(std::size_t n) {
  Partition p(n);
  for (auto& r : p.rep_) r = 0;
  return p;
}

Partition Partition::from_blocks(std::size_t n, const std::vector<std::vector<Elem>>& blocks) {
  UnionFind uf(n);
  std::vector<char> seen(n, 0);
  for (const auto& b : blocks) {
    for (Elem x : b) {
      if (x >= n) throw std::invalid_argument("partition block element out of range");
      if (seen[x]) throw std::invalid_argument("element occurs in two blocks");
      seen[x] = 1;
      uf.unite(b.front(), x);
    }
  }
  for (std::size_t x = 0; x < n; ++x)
    if (!seen[x]) throw std::invalid_argument("partition blocks do not cover the domain");
  return from_union_find(uf);
}

Partition Partition::from_union_find(UnionFind& uf) {
  const std::size_t n = uf.size();
  std::vector<std::size_t> roots(n);
  for (std::size_t x = 0; x < n; ++x) roots[x] = uf.find(x);
  return from_labels(std::span<const std::size_t>(roots));
}

std::size_t Partition::num_blocks() const {
  std::size_t c = 0;
  for (std::size_t x = 0; x < rep_.size(); ++x) c += rep_[x] == x;
  return c;
}

bool Partition::is_identity() const { return num_blocks() == rep_.size(); }

bool Partition::is_full() const {
  for (Elem r : rep_)
    if (r != 0) return false;
  return true;
}

std::vector<std::vector<Elem>> Partition::blocks() const {
  std::vector<std::vector<Elem>> out;
  std::vector<std::size_t> where(rep_.size());
  for (std::size_t x = 0; x < rep_.size(); ++x) {
    if (rep_[x] == x) {
      where[x] = out.size();
      out.emplace_back();
    }
    out[where[rep_[x]]].push_back(static_cast<Elem>(x));
  }
  return out;
}

std::vector<Elem> Partition::block_of(std::size_t x) const {
  std::vector<Elem> out;
  for (std::size_t y = rep_[x]; y < rep_.size(); ++y)
    if (rep_[y] == rep_[x]) out.push_back(static_cast<Elem>(y));
  return out;
}

std::vector<std::size_t> Partition::block_indices() const {
  std::vector<std::size_t> idx(rep_.size());
  std::size_t next = 0;
  for (std::size_t x = 0; x < rep_.size(); ++x) idx[x] = rep_[x] == x ? next++ : idx[rep_[x]];
  return idx;
}

bool Partition::leq(const Partition& other) const {
  if (other.size() != size()) throw std::invalid_argument("partition size mismatch");
  for (std::size_t x = 0; x < rep_.size(); ++x)
    if (other.rep_[x] != other.rep_[rep_[x]]) return false;
  return true;
}

Partition Partition::join(const Partition& other) const {
  if (other.size() != size()) throw std::invalid_argument("partition size mismatch");
  UnionFind uf(size());
  for (std::size_t x = 0; x < size(); ++x) {
    uf.unite(x, rep_[x]);
    uf.unite(x, other.rep_[x]);
  }
  return from_union_find(uf);
}

Partition Partition::meet(const Partition& other) const {
  if (other.size() != size()) throw std::invalid_argument("partition size mismatch");
  std::vector<std::pair<Elem, Elem>> lab(size());
  for (std::size_t x = 0; x < size(); ++x) lab[x] = {rep_[x], other.rep_[x]};
  return from_labels(std::span<const std::pair<Elem, Elem>>(lab));
}

std::string Partition::to_string() const {
  std::ostringstream os;
  os << '|';
  for (const auto& b : blocks()) {
    for (std::size_t i = 0; i < b.size(); ++i) os << (i ? "," : "") << b[i];
    os << '|';
  }
  return os.str();
}

}  // namespace algwb
