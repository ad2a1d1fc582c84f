#include "algwb/algebra.hpp"

#include <limits>
#include <stdexcept>

#include "algwb/congruence.hpp"

namespace algwb {

std::size_t checked_power(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::size_t>::max() / base)
      throw std::overflow_error("table size overflows");
    r *= base;
  }
  return r;
}

Algebra::Algebra() : d_(std::make_shared<const Data>(Data{"trivial", 1, {}})) {}

Algebra::Algebra(std::string name, std::size_t size, std::vector<Operation> ops) {
  if (size == 0) throw std::invalid_argument("algebras have nonempty universes");
  if (size > kMaxUniverse) throw std::invalid_argument("universe too large");
  for (std::size_t i = 0; i < ops.size(); ++i)
    for (std::size_t j = i + 1; j < ops.size(); ++j)
      if (ops[i].name == ops[j].name) throw std::invalid_argument("duplicate operation name '" + ops[i].name + "'");
  for (const auto& op : ops) {
    if (op.table.size() != checked_power(size, op.arity))
      throw std::invalid_argument("operation '" + op.name + "' has table of length " +
                                  std::to_string(op.table.size()) + ", expected " +
                                  std::to_string(checked_power(size, op.arity)));
    for (std::size_t i = 0; i < op.table.size(); ++i)
      if (op.table[i] >= size)
        throw std::invalid_argument("operation '" + op.name + "' entry " + std::to_string(i) +
                                    " out of range");
  }
  d_ = std::make_shared<const Data>(Data{std::move(name), size, std::move(ops)});
}

std::optional<std::size_t> Algebra::find_op(std::string_view name) const {
  for (std::size_t i = 0; i < num_ops(); ++i)
    if (op(i).name == name) return i;
  return std::nullopt;
}

Elem Algebra::apply(std::size_t o, std::span<const Elem> args) const {
  const Operation& f = op(o);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < f.arity; ++i) idx = idx * size() + args[i];
  return f.table[idx];
}

bool Algebra::same_signature(const Algebra& other) const {
  if (num_ops() != other.num_ops()) return false;
  for (std::size_t i = 0; i < num_ops(); ++i)
    if (op(i).name != other.op(i).name || op(i).arity != other.op(i).arity) return false;
  return true;
}

Algebra Algebra::renamed(std::string name) const {
  return Algebra(std::move(name), size(), d_->ops);
}

bool operator==(const Algebra& a, const Algebra& b) {
  return a.d_ == b.d_ || (a.size() == b.size() && a.d_->ops == b.d_->ops);
}

bool is_homomorphism(const Algebra& src, const Algebra& tgt, std::span<const Elem> image) {
  if (!src.same_signature(tgt) || image.size() != src.size()) return false;
  for (Elem v : image)
    if (v >= tgt.size()) return false;
  std::vector<Elem> args, imgs;
  for (std::size_t o = 0; o < src.num_ops(); ++o) {
    const std::size_t r = src.op(o).arity;
    args.assign(r, 0);
    imgs.assign(r, 0);
    const auto& table = src.op(o).table;
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      for (std::size_t i = 0; i < r; ++i) imgs[i] = image[args[i]];
      if (image[table[idx]] != tgt.apply(o, imgs)) return false;
      for (std::size_t i = r; i > 0; --i) {
        if (++args[i - 1] < src.size()) break;
        args[i - 1] = 0;
      }
    }
  }
  return true;
}

HomMap HomMap::compose_after(const HomMap& first) const {
  HomMap h{first.source, target, std::vector<Elem>(first.image.size())};
  for (std::size_t x = 0; x < first.image.size(); ++x) h.image[x] = image[first.image[x]];
  return h;
}

Product direct_product(std::span<const Algebra> factors, const Budget& budget) {
  if (factors.empty()) return Product{Algebra(), {}};
  std::size_t size = 1;
  for (const auto& F : factors) {
    if (!F.same_signature(factors[0])) throw std::invalid_argument("factors of different signature");
    size = size * F.size();
    if (size > kMaxUniverse) throw std::invalid_argument("product universe too large");
  }
  std::vector<std::vector<Elem>> coords(size, std::vector<Elem>(factors.size()));
  for (std::size_t x = 0; x < size; ++x) {
    std::size_t rest = x;
    for (std::size_t i = factors.size(); i > 0; --i) {
      coords[x][i - 1] = static_cast<Elem>(rest % factors[i - 1].size());
      rest /= factors[i - 1].size();
    }
  }
  auto encode = [&](const std::vector<Elem>& c) {
    std::size_t x = 0;
    for (std::size_t i = 0; i < factors.size(); ++i) x = x * factors[i].size() + c[i];
    return static_cast<Elem>(x);
  };
  std::vector<Operation> ops;
  const Algebra& sig = factors[0];
  for (std::size_t o = 0; o < sig.num_ops(); ++o) {
    const std::size_t r = sig.op(o).arity;
    const std::size_t len = checked_power(size, r);
    budget.charge(len, "product table");
    Operation f{sig.op(o).name, r, std::vector<Elem>(len)};
    std::vector<Elem> args(r, 0), fa(r), out(factors.size());
    for (std::size_t idx = 0; idx < len; ++idx) {
      for (std::size_t i = 0; i < factors.size(); ++i) {
        for (std::size_t j = 0; j < r; ++j) fa[j] = coords[args[j]][i];
        out[i] = factors[i].apply(o, fa);
      }
      f.table[idx] = encode(out);
      for (std::size_t j = r; j > 0; --j) {
        if (++args[j - 1] < size) break;
        args[j - 1] = 0;
      }
    }
    ops.push_back(std::move(f));
  }
  std::string name;
  for (std::size_t i = 0; i < factors.size(); ++i) name += (i ? " x " : "") + factors[i].name();
  Product p{Algebra(name, size, std::move(ops)), {}};
  for (std::size_t i = 0; i < factors.size(); ++i) {
    HomMap h{p.algebra, factors[i], std::vector<Elem>(size)};
    for (std::size_t x = 0; x < size; ++x) h.image[x] = coords[x][i];
    p.projections.push_back(std::move(h));
  }
  return p;
}

Quotient quotient(const Algebra& A, const Partition& theta) {
  if (theta.size() != A.size()) throw std::invalid_argument("partition size does not match algebra");
  if (!is_congruence(A, theta)) throw std::invalid_argument("quotient by a non-congruence");
  const auto idx = theta.block_indices();
  const auto blocks = theta.blocks();
  const std::size_t m = blocks.size();
  std::vector<Operation> ops;
  for (std::size_t o = 0; o < A.num_ops(); ++o) {
    const std::size_t r = A.op(o).arity;
    Operation f{A.op(o).name, r, std::vector<Elem>(checked_power(m, r))};
    std::vector<Elem> args(r, 0), reps(r);
    for (std::size_t k = 0; k < f.table.size(); ++k) {
      for (std::size_t j = 0; j < r; ++j) reps[j] = blocks[args[j]].front();
      f.table[k] = static_cast<Elem>(idx[A.apply(o, reps)]);
      for (std::size_t j = r; j > 0; --j) {
        if (++args[j - 1] < m) break;
        args[j - 1] = 0;
      }
    }
    ops.push_back(std::move(f));
  }
  Quotient q{Algebra(A.name() + "/" + theta.to_string(), m, std::move(ops)), {}};
  q.natural = HomMap{A, q.algebra, std::vector<Elem>(A.size())};
  for (std::size_t x = 0; x < A.size(); ++x) q.natural.image[x] = static_cast<Elem>(idx[x]);
  return q;
}

std::size_t Subpower::local(std::span<const Elem> t) const {
  auto i = universe.index_of(t);
  if (!i) throw std::invalid_argument("tuple is not an element of the subpower");
  return *i;
}

Subpower make_subpower(const Algebra& A, const Relation& universe, std::string name, const Budget& budget) {
  if (universe.empty()) throw std::invalid_argument("empty subuniverse");
  const std::size_t m = universe.size();
  const std::size_t w = universe.arity();
  if (m > kMaxUniverse) throw std::invalid_argument("subpower too large");
  std::vector<Operation> ops;
  for (std::size_t o = 0; o < A.num_ops(); ++o) {
    const std::size_t r = A.op(o).arity;
    const std::size_t len = checked_power(m, r);
    budget.charge(len, "subpower table");
    Operation f{A.op(o).name, r, std::vector<Elem>(len)};
    std::vector<Elem> args(r, 0), col(r), out(w);
    for (std::size_t k = 0; k < len; ++k) {
      for (std::size_t c = 0; c < w; ++c) {
        for (std::size_t j = 0; j < r; ++j) col[j] = universe[args[j]][c];
        out[c] = A.apply(o, col);
      }
      auto where = universe.index_of(out);
      if (!where) throw std::invalid_argument("relation is not closed under operation '" + f.name + "'");
      f.table[k] = static_cast<Elem>(*where);
      for (std::size_t j = r; j > 0; --j) {
        if (++args[j - 1] < m) break;
        args[j - 1] = 0;
      }
    }
    ops.push_back(std::move(f));
  }
  if (name.empty()) name = "Sub(" + A.name() + "^" + std::to_string(w) + ")";
  return Subpower{Algebra(std::move(name), m, std::move(ops)), universe};
}

Subpower make_subalgebra(const Algebra& A, std::span<const Elem> elements, std::string name) {
  std::vector<Elem> flat(elements.begin(), elements.end());
  return make_subpower(A, Relation(1, std::move(flat)), std::move(name));
}

Partition pull_back(const Partition& theta, std::span<const Elem> map) {
  std::vector<Elem> lab(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) lab[i] = theta.rep(map[i]);
  return Partition::from_labels(std::span<const Elem>(lab));
}

}  // namespace algwb
