#include "algwb/homomorphism.hpp"

#include <algorithm>
#include <stdexcept>

#include "algwb/closure.hpp"

namespace algwb {

namespace {

class HomSearch {
 public:
  HomSearch(const Algebra& S, const Algebra& T, const HomSearchOptions& opt)
      : S_(S), T_(T), opt_(opt), img_(S.size(), -1), used_(T.size(), 0) {}

  std::vector<HomMap> run() {
    if (!S_.same_signature(T_)) throw std::invalid_argument("homomorphism search across signatures");
    if (!opt_.allowed.empty() && opt_.allowed.size() != S_.size())
      throw std::invalid_argument("allowed lists must cover the source");
    bool ok = true;
    for (std::size_t o = 0; o < S_.num_ops() && ok; ++o)
      if (S_.op(o).arity == 0) ok = assign(S_.op(o).table[0], T_.op(o).table[0]);
    for (std::size_t x = 0; x < opt_.fixed.size() && ok; ++x)
      if (opt_.fixed[x]) ok = assign(static_cast<Elem>(x), *opt_.fixed[x]);
    if (ok && propagate()) {
      gens_ = generating_sequence(S_);
      branch(0);
    }
    std::sort(out_.begin(), out_.end(), [](const HomMap& a, const HomMap& b) { return a.image < b.image; });
    return std::move(out_);
  }

 private:
  bool allowed(Elem x, Elem v) const {
    if (opt_.allowed.empty()) return true;
    const auto& l = opt_.allowed[x];
    return std::binary_search(l.begin(), l.end(), v);
  }

  bool assign(Elem x, Elem v) {
    if (img_[x] >= 0) return img_[x] == v;
    if (!allowed(x, v)) return false;
    if (opt_.injective && used_[v]) return false;
    img_[x] = v;
    used_[v] = 1;
    order_.push_back(x);
    return true;
  }

  void undo(std::size_t mark) {
    while (order_.size() > mark) {
      const Elem x = order_.back();
      order_.pop_back();
      used_[static_cast<Elem>(img_[x])] = 0;  // only consulted by injective searches
      img_[x] = -1;
    }
    head_ = std::min(head_, mark);
  }

  // Processes every operation application with all arguments assigned.
  bool propagate() {
    std::vector<std::size_t> pos;
    std::vector<Elem> args, imgs;
    while (head_ < order_.size()) {
      const std::size_t t = head_++;
      for (std::size_t o = 0; o < S_.num_ops(); ++o) {
        const std::size_t r = S_.op(o).arity;
        if (r == 0) continue;
        args.assign(r, 0);
        imgs.assign(r, 0);
        for (std::size_t p = 0; p < r; ++p) {
          if (p > 0 && t == 0) continue;
          pos.assign(r, 0);
          pos[p] = t;
          while (true) {
            for (std::size_t j = 0; j < r; ++j) {
              args[j] = order_[pos[j]];
              imgs[j] = static_cast<Elem>(img_[args[j]]);
            }
            if (!assign(S_.apply(o, args), T_.apply(o, imgs))) return false;
            std::size_t j = r;
            bool done = true;
            while (j > 0) {
              --j;
              if (j == p) continue;
              const std::size_t lim = j < p ? t : t + 1;
              if (++pos[j] < lim) {
                done = false;
                break;
              }
              pos[j] = 0;
            }
            if (done) break;
          }
        }
      }
    }
    return true;
  }

  void branch(std::size_t g) {
    if (out_.size() >= opt_.limit) return;
    opt_.budget.charge(++nodes_, "homomorphism search");
    while (g < gens_.size() && img_[gens_[g]] >= 0) ++g;
    if (g == gens_.size()) {
      HomMap h{S_, T_, std::vector<Elem>(S_.size())};
      for (std::size_t x = 0; x < S_.size(); ++x) {
        if (img_[x] < 0) throw std::logic_error("generating sequence left an element unassigned");
        h.image[x] = static_cast<Elem>(img_[x]);
      }
      out_.push_back(std::move(h));
      return;
    }
    const Elem x = gens_[g];
    for (std::size_t v = 0; v < T_.size() && out_.size() < opt_.limit; ++v) {
      const std::size_t mark = order_.size();
      if (assign(x, static_cast<Elem>(v)) && propagate()) branch(g + 1);
      undo(mark);
    }
  }

  const Algebra& S_;
  const Algebra& T_;
  HomSearchOptions opt_;
  std::vector<int> img_;
  std::vector<char> used_;
  std::vector<Elem> order_;
  std::size_t head_ = 0;
  std::vector<Elem> gens_;
  std::vector<HomMap> out_;
  std::size_t nodes_ = 0;
};

}  // namespace

std::vector<HomMap> homomorphisms(const Algebra& src, const Algebra& tgt, const HomSearchOptions& options) {
  return HomSearch(src, tgt, options).run();
}

std::optional<HomMap> find_homomorphism(const Algebra& src, const Algebra& tgt, HomSearchOptions options) {
  options.limit = 1;
  auto v = homomorphisms(src, tgt, options);
  if (v.empty()) return std::nullopt;
  return v.front();
}

std::vector<HomMap> automorphisms(const Algebra& A, const Budget& budget) {
  HomSearchOptions opt;
  opt.injective = true;
  opt.budget = budget;
  return homomorphisms(A, A, opt);
}

std::optional<HomMap> isomorphism(const Algebra& A, const Algebra& B, const Budget& budget) {
  if (A.size() != B.size() || !A.same_signature(B)) return std::nullopt;
  HomSearchOptions opt;
  opt.injective = true;
  opt.budget = budget;
  return find_homomorphism(A, B, opt);
}

}  // namespace algwb
