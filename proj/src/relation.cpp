#include "algwb/relation.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace algwb {

Relation::Relation(std::size_t arity) : arity_(arity) {
  if (arity == 0) throw std::invalid_argument("relations must have positive arity");
}

Relation::Relation(std::size_t arity, std::vector<Elem> flat) : arity_(arity), data_(std::move(flat)) {
  if (arity == 0) throw std::invalid_argument("relations must have positive arity");
  if (data_.size() % arity != 0) throw std::invalid_argument("tuple data length not a multiple of arity");
  normalize();
}

void Relation::normalize() {
  const std::size_t m = size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(data_.begin() + a * arity_, data_.begin() + (a + 1) * arity_,
                                        data_.begin() + b * arity_, data_.begin() + (b + 1) * arity_);
  };
  if (!std::is_sorted(order.begin(), order.end(), less)) std::sort(order.begin(), order.end(), less);
  std::vector<Elem> out;
  out.reserve(data_.size());
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = order[k];
    if (!out.empty() && std::equal(out.end() - arity_, out.end(), data_.begin() + i * arity_)) continue;
    out.insert(out.end(), data_.begin() + i * arity_, data_.begin() + (i + 1) * arity_);
  }
  data_ = std::move(out);
}

Relation Relation::from_tuples(std::size_t arity, const std::vector<std::vector<Elem>>& tuples) {
  std::vector<Elem> flat;
  flat.reserve(arity * tuples.size());
  for (const auto& t : tuples) {
    if (t.size() != arity) throw std::invalid_argument("tuple of wrong arity");
    flat.insert(flat.end(), t.begin(), t.end());
  }
  return Relation(arity, std::move(flat));
}

Relation Relation::full(std::size_t n, std::size_t arity) {
  std::vector<Elem> flat;
  std::vector<Elem> t(arity, 0);
  if (n == 0) return Relation(arity);
  while (true) {
    flat.insert(flat.end(), t.begin(), t.end());
    std::size_t i = arity;
    while (i > 0) {
      --i;
      if (++t[i] < n) break;
      t[i] = 0;
      if (i == 0) return Relation(arity, std::move(flat));
    }
  }
}

Relation Relation::equality(std::size_t n) {
  std::vector<Elem> flat;
  for (std::size_t a = 0; a < n; ++a) {
    flat.push_back(static_cast<Elem>(a));
    flat.push_back(static_cast<Elem>(a));
  }
  return Relation(2, std::move(flat));
}

std::vector<Elem> Relation::tuple(std::size_t i) const {
  auto s = (*this)[i];
  return {s.begin(), s.end()};
}

std::optional<std::size_t> Relation::index_of(std::span<const Elem> t) const {
  if (t.size() != arity_) return std::nullopt;
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    auto m = (*this)[mid];
    if (std::lexicographical_compare(m.begin(), m.end(), t.begin(), t.end()))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < size() && std::equal(t.begin(), t.end(), (*this)[lo].begin())) return lo;
  return std::nullopt;
}

Relation Relation::project(std::span<const std::size_t> coords) const {
  if (coords.empty()) throw std::invalid_argument("projection onto no coordinates");
  for (auto c : coords)
    if (c >= arity_) throw std::invalid_argument("projection coordinate out of range");
  std::vector<Elem> flat;
  flat.reserve(size() * coords.size());
  for (std::size_t i = 0; i < size(); ++i)
    for (auto c : coords) flat.push_back(data_[i * arity_ + c]);
  return Relation(coords.size(), std::move(flat));
}

std::vector<Elem> Relation::coordinate_values(std::size_t i) const {
  std::vector<Elem> v;
  for (std::size_t k = 0; k < size(); ++k) v.push_back(data_[k * arity_ + i]);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

Relation Relation::permute(std::span<const std::size_t> perm) const {
  if (perm.size() != arity_) throw std::invalid_argument("permutation length does not match arity");
  std::vector<char> seen(arity_, 0);
  for (auto p : perm) {
    if (p >= arity_ || seen[p]) throw std::invalid_argument("not a permutation");
    seen[p] = 1;
  }
  return project(perm);
}

Relation Relation::intersect(const Relation& other) const {
  if (other.arity_ != arity_) throw std::invalid_argument("intersection of relations of different arity");
  std::vector<Elem> flat;
  std::size_t j = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    auto t = (*this)[i];
    while (j < other.size() &&
           std::lexicographical_compare(other[j].begin(), other[j].end(), t.begin(), t.end()))
      ++j;
    if (j < other.size() && std::equal(t.begin(), t.end(), other[j].begin()))
      flat.insert(flat.end(), t.begin(), t.end());
  }
  Relation r(arity_);
  r.data_ = std::move(flat);
  return r;
}

Relation Relation::product(const Relation& other) const {
  std::vector<Elem> flat;
  flat.reserve(size() * other.size() * (arity_ + other.arity_));
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < other.size(); ++j) {
      auto a = (*this)[i];
      auto b = other[j];
      flat.insert(flat.end(), a.begin(), a.end());
      flat.insert(flat.end(), b.begin(), b.end());
    }
  Relation r(arity_ + other.arity_);
  r.data_ = std::move(flat);  // already lexicographically sorted
  return r;
}

bool Relation::subset_of(const Relation& other) const {
  if (other.arity_ != arity_) return false;
  return intersect(other).size() == size();
}

Relation Relation::unite(const Relation& other) const {
  if (other.arity_ != arity_) throw std::invalid_argument("union of relations of different arity");
  std::vector<Elem> flat(data_);
  flat.insert(flat.end(), other.data_.begin(), other.data_.end());
  return Relation(arity_, std::move(flat));
}

std::string Relation::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < size(); ++i) {
    os << (i ? " " : "") << '(';
    for (std::size_t c = 0; c < arity_; ++c) os << (c ? "," : "") << data_[i * arity_ + c];
    os << ')';
  }
  os << '}';
  return os.str();
}

bool operator<(const Relation& a, const Relation& b) {
  if (a.arity_ != b.arity_) return a.arity_ < b.arity_;
  if (a.size() != b.size()) return a.size() < b.size();
  return a.data_ < b.data_;
}

}  // namespace algwb
