#include "algwb/terms.hpp"

#include <array>
#include <stdexcept>

#include "algwb/congruence.hpp"

namespace algwb {

namespace {

std::size_t checked_pow(std::size_t base, std::size_t exp, const Budget& budget, const char* what) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > budget.limit / base) throw BudgetExceeded(what, budget.limit);
    r *= base;
  }
  return r;
}

// Calls f on every assignment of `vars` variables over [0, n), lexicographically.
template <class F>
void for_each_assignment(std::size_t n, std::size_t vars, F&& f) {
  std::vector<Elem> a(vars, 0);
  if (n == 0) return;
  while (true) {
    f(std::span<const Elem>(a));
    std::size_t i = vars;
    while (i > 0 && ++a[i - 1] == n) a[--i] = 0;
    if (i == 0) return;
  }
}

TermWitness make_witness(const Algebra& A, TermKind kind, Term term, const Budget& budget) {
  TermWitness w;
  w.kind = kind;
  w.arity = term.arity;
  w.universe = A.size();
  w.table = term.table(A, budget);
  w.derivation = std::move(term);
  return w;
}

}  // namespace

Term Term::variable(std::size_t arity, std::size_t i) {
  if (i >= arity) throw std::invalid_argument("variable index out of range");
  Term t;
  t.arity = arity;
  t.nodes.push_back(Node{Node::kVariable, i, {}});
  return t;
}

Term Term::from_provenance(const ClosureResult& closure, std::size_t index, std::size_t arity) {
  if (closure.provenance.size() != closure.tuples.size()) throw std::invalid_argument("closure has no provenance");
  if (index >= closure.tuples.size()) throw std::invalid_argument("tuple index out of range");
  Term t;
  t.arity = arity;
  std::vector<std::int64_t> node_of(closure.tuples.size(), -1);
  std::vector<std::pair<std::size_t, bool>> stack{{index, false}};
  while (!stack.empty()) {
    auto [i, expanded] = stack.back();
    stack.pop_back();
    if (node_of[i] >= 0) continue;
    const Provenance& p = closure.provenance[i];
    if (!expanded) {
      stack.emplace_back(i, true);
      if (p.op != Provenance::kGenerator)
        for (auto a : p.arguments)
          if (node_of[a] < 0) stack.emplace_back(a, false);
      continue;
    }
    Node nd;
    if (p.op == Provenance::kGenerator) {
      if (p.generator >= arity) throw std::invalid_argument("generator index exceeds term arity");
      nd.variable = p.generator;
    } else {
      nd.op = p.op;
      for (auto a : p.arguments) nd.args.push_back(static_cast<std::size_t>(node_of[a]));
    }
    node_of[i] = static_cast<std::int64_t>(t.nodes.size());
    t.nodes.push_back(std::move(nd));
  }
  return t;
}

Elem Term::evaluate(const Algebra& A, std::span<const Elem> vars, std::vector<Elem>& scratch) const {
  if (vars.size() != arity) throw std::invalid_argument("wrong number of term arguments");
  scratch.resize(nodes.size());
  const std::size_t n = A.size();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& nd = nodes[i];
    if (nd.op == Node::kVariable) {
      scratch[i] = vars[nd.variable];
      continue;
    }
    std::size_t idx = 0;
    for (std::size_t a : nd.args) idx = idx * n + scratch[a];
    scratch[i] = A.op(static_cast<std::size_t>(nd.op)).table[idx];
  }
  return scratch.back();
}

std::vector<Elem> Term::table(const Algebra& A, const Budget& budget) const {
  const std::size_t size = checked_pow(A.size(), arity, budget, "term table");
  std::vector<Elem> out;
  out.reserve(size);
  std::vector<Elem> scratch;
  for_each_assignment(A.size(), arity, [&](std::span<const Elem> a) { out.push_back(evaluate(A, a, scratch)); });
  return out;
}

std::string Term::to_string(const Algebra& A) const {
  constexpr std::size_t kInlineLimit = 4096;
  std::vector<std::string> text(nodes.size());
  bool too_long = false;
  for (std::size_t i = 0; i < nodes.size() && !too_long; ++i) {
    const Node& nd = nodes[i];
    if (nd.op == Node::kVariable) {
      text[i] = "x" + std::to_string(nd.variable);
      continue;
    }
    std::string s = A.op(static_cast<std::size_t>(nd.op)).name;
    if (!nd.args.empty()) {
      s += '(';
      for (std::size_t j = 0; j < nd.args.size(); ++j) {
        if (j) s += ',';
        s += text[nd.args[j]];
      }
      s += ')';
    }
    too_long = s.size() > kInlineLimit;
    text[i] = std::move(s);
  }
  if (!too_long) return text.back();
  // shared subterms make the inline form explode; list the nodes instead
  std::string out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& nd = nodes[i];
    out += "t" + std::to_string(i) + " = ";
    if (nd.op == Node::kVariable) {
      out += "x" + std::to_string(nd.variable);
    } else {
      out += A.op(static_cast<std::size_t>(nd.op)).name + "(";
      for (std::size_t j = 0; j < nd.args.size(); ++j) out += (j ? ",t" : "t") + std::to_string(nd.args[j]);
      out += ")";
    }
    out += '\n';
  }
  return out;
}

std::string TermWitness::describe() const {
  switch (kind) {
    case TermKind::Maltsev: return "maltsev";
    case TermKind::NearUnanimity: return "nu(" + std::to_string(k) + ")";
    case TermKind::Parallelogram: return "parallelogram(" + std::to_string(m) + "," + std::to_string(n) + ")";
    case TermKind::Difference: return "difference";
  }
  return "?";
}

IdentitySystem maltsev_identities() { return {2, {{{0, 0, 1}, 1}, {{0, 1, 1}, 0}}}; }

IdentitySystem near_unanimity_identities(std::size_t k) {
  if (k < 3) throw std::invalid_argument("near-unanimity arity must be at least 3");
  IdentitySystem s{2, {}};
  for (std::size_t i = 0; i < k; ++i) {
    IdentityRow r{std::vector<std::uint8_t>(k, 0), 0};
    r.args[i] = 1;
    s.rows.push_back(std::move(r));
  }
  return s;
}

IdentitySystem parallelogram_identities(std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) throw std::invalid_argument("parallelogram split needs m, n >= 1");
  const std::size_t k = m + n;
  IdentitySystem s{3, {}};
  for (std::size_t i = 0; i < k; ++i) {
    IdentityRow r;
    r.result = 1;
    if (i < m)
      r.args = {0, 0, 1};
    else
      r.args = {1, 0, 0};
    for (std::size_t j = 0; j < k; ++j) r.args.push_back(i == j ? 2 : 1);
    s.rows.push_back(std::move(r));
  }
  return s;
}

IdentitySystem identities_for(const TermWitness& w) {
  switch (w.kind) {
    case TermKind::Maltsev: return maltsev_identities();
    case TermKind::NearUnanimity: return near_unanimity_identities(w.k);
    case TermKind::Parallelogram: return parallelogram_identities(w.m, w.n);
    case TermKind::Difference: return {2, {{{0, 0, 1}, 1}}};
  }
  throw std::invalid_argument("unknown term kind");
}

std::optional<Term> find_term(const Algebra& A, const IdentitySystem& system, std::size_t arity,
                              const Budget& budget) {
  for (const auto& r : system.rows)
    if (r.args.size() != arity) throw std::invalid_argument("identity row has wrong arity");
  // One coordinate per (row, assignment); repeated coordinates carry no information.
  TupleTable coords(arity + 1);
  std::vector<Elem> c(arity + 1);
  for (const auto& row : system.rows)
    for_each_assignment(A.size(), system.variables, [&](std::span<const Elem> a) {
      for (std::size_t j = 0; j < arity; ++j) c[j] = a[row.args[j]];
      c[arity] = a[row.result];
      coords.insert(c);
      budget.charge(coords.size(), "identity coordinates");
    });
  const std::size_t width = coords.size();
  if (width == 0) return Term::variable(arity, 0);
  std::vector<Elem> gens(arity * width);
  std::vector<Elem> target(width);
  for (std::size_t i = 0; i < width; ++i) {
    for (std::size_t j = 0; j < arity; ++j) gens[j * width + i] = coords[i][j];
    target[i] = coords[i][arity];
  }
  ClosureOptions opt;
  opt.budget = budget;
  opt.target = target;
  opt.record_provenance = true;
  const ClosureResult res = close_subpower(A, width, gens, opt);
  if (!res.target_index) return std::nullopt;
  return Term::from_provenance(res, *res.target_index, arity);
}

std::optional<TermWitness> has_parallelogram_term(const Algebra& A, std::size_t m, std::size_t n,
                                                  const Budget& budget) {
  auto t = find_term(A, parallelogram_identities(m, n), m + n + 3, budget);
  if (!t) return std::nullopt;
  TermWitness w = make_witness(A, TermKind::Parallelogram, std::move(*t), budget);
  w.m = m;
  w.n = n;
  w.k = m + n;
  if (!satisfies_identities(w)) throw std::logic_error("parallelogram witness failed its identities");
  return w;
}

std::optional<TermWitness> has_maltsev_term(const Algebra& A, const Budget& budget) {
  auto t = find_term(A, maltsev_identities(), 3, budget);
  if (!t) return std::nullopt;
  TermWitness w = make_witness(A, TermKind::Maltsev, std::move(*t), budget);
  if (!satisfies_identities(w)) throw std::logic_error("Maltsev witness failed its identities");
  return w;
}

std::optional<TermWitness> has_nu_term(const Algebra& A, std::size_t k, const Budget& budget) {
  auto t = find_term(A, near_unanimity_identities(k), k, budget);
  if (!t) return std::nullopt;
  TermWitness w = make_witness(A, TermKind::NearUnanimity, std::move(*t), budget);
  w.k = k;
  if (!satisfies_identities(w)) throw std::logic_error("near-unanimity witness failed its identities");
  return w;
}

bool satisfies_identities(const TermWitness& w) {
  const IdentitySystem s = identities_for(w);
  const std::size_t n = w.universe;
  std::size_t expect = 1;
  for (std::size_t i = 0; i < w.arity; ++i) expect *= n;
  if (w.table.size() != expect) return false;
  bool ok = true;
  for (const auto& row : s.rows) {
    if (row.args.size() != w.arity) return false;
    for_each_assignment(n, s.variables, [&](std::span<const Elem> a) {
      std::size_t idx = 0;
      for (auto v : row.args) idx = idx * n + a[v];
      if (w.table[idx] != a[row.result]) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

bool verify_witness(const Algebra& A, const TermWitness& w) {
  if (A.size() != w.universe || w.derivation.arity != w.arity || w.derivation.nodes.empty()) return false;
  for (const auto& nd : w.derivation.nodes)
    if (nd.op != Term::Node::kVariable &&
        (static_cast<std::size_t>(nd.op) >= A.num_ops() || A.op(static_cast<std::size_t>(nd.op)).arity != nd.args.size()))
      return false;
  return w.derivation.table(A) == w.table && satisfies_identities(w);
}

CmGuard cm_guard(const TermWitness& w) {
  if (w.kind == TermKind::Difference) throw HypothesisError("a difference term does not certify modularity");
  if (!satisfies_identities(w)) throw HypothesisError(w.describe() + " witness fails its identities");
  return CmGuard(w.describe() + " term");
}

std::optional<std::size_t> ParallelogramProfile::least_k() const {
  for (std::size_t i = 0; i < exists.size(); ++i)
    if (exists[i].front()) return i + 2;
  return std::nullopt;
}

ParallelogramProfile parallelogram_profile(const Algebra& A, std::size_t k_max, const Budget& budget) {
  if (k_max < 2) throw std::invalid_argument("k_max must be at least 2");
  ParallelogramProfile p;
  p.k_max = k_max;
  for (std::size_t k = 2; k <= k_max; ++k) {
    std::vector<bool> row;
    for (std::size_t m = 1; m < k; ++m) row.push_back(has_parallelogram_term(A, m, k - m, budget).has_value());
    for (bool v : row)
      if (v != row.front())
        throw std::logic_error("parallelogram verdicts disagree across splits of k=" + std::to_string(k));
    p.exists.push_back(std::move(row));
  }
  return p;
}

std::optional<TermWitness> least_parallelogram_term(const Algebra& A, std::size_t k_max, const Budget& budget) {
  for (std::size_t k = 2; k <= k_max; ++k)
    if (auto w = has_parallelogram_term(A, 1, k - 1, budget)) return w;
  return std::nullopt;
}

DifferenceCheck check_difference_term(const Term& d, const DifferenceTarget& target, const Budget& budget) {
  if (d.arity != 3) throw std::invalid_argument("difference term must be ternary");
  const Algebra& C = target.algebra;
  const Partition& alpha = target.alpha;
  const std::size_t n = C.size();
  const std::vector<Elem> T = d.table(C, budget);
  auto at = [&](std::size_t x, std::size_t y, std::size_t z) { return T[(x * n + y) * n + z]; };
  auto fail = [](std::string s) { return DifferenceCheck{false, std::move(s)}; };

  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (at(x, x, y) != y) return fail("d(x,x,y) != y at x=" + std::to_string(x) + ", y=" + std::to_string(y));
  for (std::size_t x = 0; x < n; ++x)
    for (Elem y : alpha.block_of(x))
      if (at(y, x, x) != y) return fail("d(y,x,x) != y at x=" + std::to_string(x) + ", y=" + std::to_string(y));

  std::vector<std::array<Elem, 3>> triples;
  for (std::size_t x = 0; x < n; ++x)
    for (Elem y : alpha.block_of(x))
      for (Elem z : alpha.block_of(x)) triples.push_back({static_cast<Elem>(x), y, z});
  for (std::size_t o = 0; o < C.num_ops(); ++o) {
    const auto& f = C.op(o);
    const std::size_t r = f.arity;
    checked_pow(triples.size(), r, budget, "difference term homomorphism check");
    std::vector<std::size_t> pick(r, 0);
    std::vector<Elem> col(r);
    while (true) {
      std::size_t iu = 0, iv = 0, iw = 0;
      for (std::size_t j = 0; j < r; ++j) {
        const auto& t = triples[pick[j]];
        iu = iu * n + t[0];
        iv = iv * n + t[1];
        iw = iw * n + t[2];
        col[j] = at(t[0], t[1], t[2]);
      }
      if (at(f.table[iu], f.table[iv], f.table[iw]) != C.apply(o, col))
        return fail("d does not commute with " + f.name + " on alpha-related arguments");
      std::size_t j = r;
      while (j > 0 && ++pick[j - 1] == triples.size()) pick[--j] = 0;
      if (j == 0) break;
    }
  }
  return {};
}

std::optional<DifferenceTerm> find_difference_term(const Algebra& A, const std::vector<DifferenceTarget>& targets,
                                                   const Budget& budget) {
  for (const auto& t : targets) {
    if (!t.algebra.same_signature(A)) throw std::invalid_argument("difference target has another signature");
    if (!is_congruence(t.algebra, t.alpha)) throw std::invalid_argument("difference target is not a congruence");
    if (!commutator(t.algebra, t.alpha, t.alpha, budget).is_identity())
      throw std::invalid_argument("difference target congruence is not abelian");
  }
  auto passes_all = [&](const Term& d) {
    for (const auto& t : targets)
      if (!check_difference_term(d, t, budget).ok) return false;
    return true;
  };
  if (auto mal = has_maltsev_term(A, budget); mal && passes_all(mal->derivation)) return DifferenceTerm{*mal, targets};

  const std::size_t n = A.size();
  const std::size_t width = n * n * n;
  std::vector<Elem> gens(3 * width);
  for (std::size_t c = 0; c < width; ++c) {
    gens[c] = static_cast<Elem>(c / (n * n));
    gens[width + c] = static_cast<Elem>(c / n % n);
    gens[2 * width + c] = static_cast<Elem>(c % n);
  }
  ClosureOptions opt;
  opt.budget = budget;
  opt.record_provenance = true;
  const ClosureResult clone = close_subpower(A, width, gens, opt);
  for (std::size_t i = 0; i < clone.tuples.size(); ++i) {
    const auto tab = clone.tuples[i];
    bool left_identity = true;
    for (std::size_t x = 0; x < n && left_identity; ++x)
      for (std::size_t y = 0; y < n && left_identity; ++y) left_identity = tab[(x * n + x) * n + y] == y;
    if (!left_identity) continue;
    Term d = Term::from_provenance(clone, i, 3);
    if (!passes_all(d)) continue;
    TermWitness w = make_witness(A, TermKind::Difference, std::move(d), budget);
    return DifferenceTerm{std::move(w), targets};
  }
  return std::nullopt;
}

}  // namespace algwb
