#include "algwb/closure.hpp"

#include <algorithm>
#include <cstring>
#include <set>
#include <stdexcept>

namespace algwb {

TupleTable::TupleTable(std::size_t width) : width_(width), slots_(64, 0) {}

std::uint64_t TupleTable::hash(std::span<const Elem> t) const {
  std::uint64_t h = 0x9E3779B97F4A7C15ull;
  for (Elem e : t) {
    h ^= e + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    h *= 0xBF58476D1CE4E5B9ull;
  }
  return h ^ (h >> 31);
}

bool TupleTable::equal_at(std::size_t i, std::span<const Elem> t) const {
  return std::equal(t.begin(), t.end(), data_.begin() + i * width_);
}

void TupleTable::grow() {
  std::vector<std::uint32_t> fresh(slots_.size() * 2, 0);
  const std::size_t mask = fresh.size() - 1;
  for (std::size_t i = 0; i < count_; ++i) {
    std::size_t s = hash((*this)[i]) & mask;
    while (fresh[s] != 0) s = (s + 1) & mask;
    fresh[s] = static_cast<std::uint32_t>(i + 1);
  }
  slots_ = std::move(fresh);
}

std::pair<std::size_t, bool> TupleTable::insert(std::span<const Elem> t) {
  if ((count_ + 1) * 2 > slots_.size()) grow();
  const std::size_t mask = slots_.size() - 1;
  std::size_t s = hash(t) & mask;
  while (slots_[s] != 0) {
    if (equal_at(slots_[s] - 1, t)) return {slots_[s] - 1, false};
    s = (s + 1) & mask;
  }
  if (count_ >= 0xFFFFFFF0u) throw std::length_error("tuple table full");
  data_.insert(data_.end(), t.begin(), t.end());
  slots_[s] = static_cast<std::uint32_t>(count_ + 1);
  return {count_++, true};
}

std::optional<std::size_t> TupleTable::find(std::span<const Elem> t) const {
  const std::size_t mask = slots_.size() - 1;
  std::size_t s = hash(t) & mask;
  while (slots_[s] != 0) {
    if (equal_at(slots_[s] - 1, t)) return slots_[s] - 1;
    s = (s + 1) & mask;
  }
  return std::nullopt;
}

Relation TupleTable::to_relation() const {
  if (width_ == 0) throw std::invalid_argument("zero-width table");
  return Relation(width_, data_);
}

namespace {

struct OpInfo {
  std::size_t index;
  std::size_t arity;
  const Elem* table;
};

}  // namespace

ClosureResult close_subpower(const Algebra& A, std::size_t width, std::span<const Elem> generators,
                             const ClosureOptions& options) {
  if (width == 0 || generators.size() % width != 0) throw std::invalid_argument("bad generator data");
  ClosureResult res{TupleTable(width), {}, std::nullopt};
  const std::size_t n = A.size();
  const bool prov = options.record_provenance;

  std::vector<Elem> scratch(width);
  auto add = [&](std::span<const Elem> t, Provenance&& p) {
    auto [idx, fresh] = res.tuples.insert(t);
    if (fresh) {
      if (prov) res.provenance.push_back(std::move(p));
      options.budget.charge(res.tuples.size(), "subuniverse closure");
      if (options.target && !res.target_index && std::equal(t.begin(), t.end(), options.target->begin()))
        res.target_index = idx;
    }
    return fresh;
  };

  const std::size_t ngen = generators.size() / width;
  for (std::size_t g = 0; g < ngen; ++g) {
    Provenance p;
    p.generator = g;
    add(generators.subspan(g * width, width), std::move(p));
    if (res.target_index) return res;
  }
  const std::size_t prefix = std::min(options.closed_prefix, res.tuples.size());

  std::vector<OpInfo> ops;
  for (std::size_t o = 0; o < A.num_ops(); ++o) {
    const auto& f = A.op(o);
    if (f.arity == 0) {
      std::fill(scratch.begin(), scratch.end(), f.table[0]);
      Provenance p;
      p.op = static_cast<std::int32_t>(o);
      add(scratch, std::move(p));
      if (res.target_index) return res;
    } else {
      ops.push_back({o, f.arity, f.table.data()});
    }
  }

  std::vector<std::uint32_t> args;
  std::vector<std::size_t> stride;
  for (std::size_t t = prefix; t < res.tuples.size(); ++t) {
    for (const auto& f : ops) {
      const std::size_t r = f.arity;
      stride.assign(r, 1);
      for (std::size_t j = r - 1; j > 0; --j) stride[j - 1] = stride[j] * n;
      // Argument tuples over [0,t] whose first occurrence of t is at position p.
      for (std::size_t p = 0; p < r; ++p) {
        args.assign(r, 0);
        args[p] = static_cast<std::uint32_t>(t);
        if (p > 0 && t == 0) continue;
        while (true) {
          if (r == 1) {
            auto a = res.tuples[args[0]];
            for (std::size_t c = 0; c < width; ++c) scratch[c] = f.table[a[c]];
          } else if (r == 2) {
            auto a = res.tuples[args[0]];
            auto b = res.tuples[args[1]];
            for (std::size_t c = 0; c < width; ++c) scratch[c] = f.table[a[c] * n + b[c]];
          } else {
            for (std::size_t c = 0; c < width; ++c) {
              std::size_t idx = 0;
              for (std::size_t j = 0; j < r; ++j) idx += res.tuples[args[j]][c] * stride[j];
              scratch[c] = f.table[idx];
            }
          }
          Provenance pv;
          if (prov) {
            pv.op = static_cast<std::int32_t>(f.index);
            pv.arguments = args;
          }
          add(scratch, std::move(pv));
          if (res.target_index) return res;
          // advance odometer over positions != p: before p in [0,t), after p in [0,t]
          std::size_t j = r;
          bool done = true;
          while (j > 0) {
            --j;
            if (j == p) continue;
            const std::uint32_t lim = static_cast<std::uint32_t>(j < p ? t : t + 1);
            if (++args[j] < lim) {
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
  return res;
}

Relation generate_subuniverse(const Algebra& A, std::size_t width, std::span<const Elem> generators,
                              const Budget& budget) {
  ClosureOptions opt;
  opt.budget = budget;
  auto res = close_subpower(A, width, generators, opt);
  if (res.tuples.size() == 0) return Relation(width);
  return res.tuples.to_relation();
}

Relation generate_subuniverse(const Algebra& A, const Relation& generators, const Budget& budget) {
  return generate_subuniverse(A, generators.arity(), generators.flat(), budget);
}

bool is_subuniverse(const Algebra& A, const Relation& R, const Budget& budget) {
  return generate_subuniverse(A, R, budget).size() == R.size();
}

namespace {

Relation close_with(const Algebra& A, const Relation& closed, std::span<const Elem> extra,
                    const Budget& budget) {
  std::vector<Elem> gens(closed.flat().begin(), closed.flat().end());
  gens.insert(gens.end(), extra.begin(), extra.end());
  ClosureOptions opt;
  opt.budget = budget;
  opt.closed_prefix = closed.size();
  return close_subpower(A, closed.arity(), gens, opt).tuples.to_relation();
}

}  // namespace

std::vector<Relation> subuniverses_between(const Algebra& A, const Relation& lower, const Relation& upper,
                                           const Budget& budget) {
  if (lower.arity() != upper.arity()) throw std::invalid_argument("arity mismatch");
  if (!lower.subset_of(upper)) throw std::invalid_argument("lower bound not contained in upper bound");
  std::set<Relation> found;
  std::vector<Relation> work;
  auto push = [&](Relation r) {
    if (found.insert(r).second) {
      budget.charge(found.size(), "subuniverse enumeration");
      work.push_back(std::move(r));
    }
  };
  if (lower.empty()) {
    for (std::size_t i = 0; i < upper.size(); ++i)
      push(generate_subuniverse(A, upper.arity(), upper[i], budget));
  } else {
    push(lower);
  }
  while (!work.empty()) {
    Relation U = std::move(work.back());
    work.pop_back();
    for (std::size_t i = 0; i < upper.size(); ++i) {
      if (U.contains(upper[i])) continue;
      Relation V = close_with(A, U, upper[i], budget);
      if (!V.subset_of(upper)) throw std::invalid_argument("upper bound is not a subuniverse");
      push(std::move(V));
    }
  }
  std::vector<Relation> out(found.begin(), found.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Relation> subalgebras(const Algebra& A, const Budget& budget) {
  Relation bottom = generate_subuniverse(A, 1, {}, budget);
  return subuniverses_between(A, bottom, Relation::full(A.size(), 1), budget);
}

std::vector<Elem> generating_sequence(const Algebra& A) {
  std::vector<Elem> seq;
  Relation cur = generate_subuniverse(A, 1, {});
  for (std::size_t x = 0; x < A.size(); ++x) {
    const Elem e = static_cast<Elem>(x);
    if (cur.contains(std::span<const Elem>(&e, 1))) continue;
    seq.push_back(e);
    cur = cur.empty() ? generate_subuniverse(A, 1, std::span<const Elem>(&e, 1))
                      : close_with(A, cur, std::span<const Elem>(&e, 1), Budget{});
  }
  return seq;
}

}  // namespace algwb
