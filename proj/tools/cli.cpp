#include "cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "algwb/closure.hpp"
#include "algwb/commutator.hpp"
#include "algwb/congruence.hpp"
#include "algwb/corpus.hpp"
#include "algwb/io.hpp"
#include "algwb/reduction.hpp"
#include "algwb/relations.hpp"
#include "algwb/splitcheck.hpp"
#include "algwb/terms.hpp"

namespace algwb::cli {

using io::Json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  std::ostringstream ss;
  for (unsigned int i = 0; i < len; ++i) ss << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return ss.str();
}

namespace {

struct Options {
  std::string algebra, relation, certificate, output, alpha, beta, corpus_name;
  std::size_t k_max = 4, exponent = 2, floor = 0, nu = 0, jobs = 1;
  std::optional<std::size_t> budget, index_bound;
  bool json = false, timing = false, iterate = false;
};

class Context {
 public:
  explicit Context(const Options& o) : opt(o) {}

  const Options& opt;
  Budget budget;
  Json inputs = Json::array();

  Json load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    inputs.push_back({{"path", path}, {"sha256", sha256_hex(bytes)}});
    try {
      return io::parse(bytes);
    } catch (const ParseError& e) {
      throw ParseError(path + ": " + e.what());
    }
  }

  const Algebra& algebra() {
    if (!algebra_) {
      const Json j = load(opt.algebra);
      try {
        algebra_ = io::algebra_from_json(j);
      } catch (const ParseError& e) {
        throw ParseError(opt.algebra + ": " + e.what());
      }
    }
    return *algebra_;
  }

  Relation relation() {
    if (opt.relation.empty()) throw ParseError("--relation is required");
    const Json j = load(opt.relation);
    try {
      return io::relation_from_json(j);
    } catch (const ParseError& e) {
      throw ParseError(opt.relation + ": " + e.what());
    }
  }

  StarRelation star() {
    if (opt.relation.empty()) throw ParseError("--relation is required");
    const Json j = load(opt.relation);
    try {
      return io::star_from_json(algebra(), j);
    } catch (const ParseError& e) {
      throw ParseError(opt.relation + ": " + e.what());
    }
  }

  TermWitness parallelogram() {
    auto w = least_parallelogram_term(algebra(), opt.k_max, budget);
    if (!w) throw HypothesisError("no parallelogram term with k <= " + std::to_string(opt.k_max));
    return *w;
  }

  CmGuard guard() { return cm_guard(parallelogram()); }

 private:
  std::optional<Algebra> algebra_;
};

Json blocks(const Partition& p) { return io::to_json(p); }

// "0", "1", "#k" (lattice index) or a JSON block list.
std::size_t resolve_partition(const std::string& text, const CongruenceLattice& L, const char* what) {
  if (text == "0") return L.bottom();
  if (text == "1") return L.top();
  if (!text.empty() && text[0] == '#') {
    std::size_t k = 0;
    try {
      k = std::stoul(text.substr(1));
    } catch (const std::exception&) {
      throw ParseError(std::string(what) + ": bad lattice index '" + text + "'");
    }
    if (k >= L.size()) throw ParseError(std::string(what) + ": lattice index out of range");
    return k;
  }
  const Partition p = io::partition_from_json(io::parse(text), L[0].size());
  auto k = L.find(p);
  if (!k) throw ParseError(std::string(what) + " is not a congruence");
  return *k;
}

template <class F>
void parallel_for(std::size_t jobs, std::size_t count, F f) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += jobs) {
        try {
          f(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Json witness_json(const Algebra& A, const TermWitness& w) {
  return {{"kind", w.describe()}, {"k", w.k}, {"arity", w.arity}, {"term", w.derivation.to_string(A)},
          {"verified", verify_witness(A, w)}};
}

Json split_json(const CommutatorTable& T, const SplittingTriple& s) {
  return {{"alpha", blocks(T[s.alpha])}, {"beta", blocks(T[s.beta])}, {"kappa", blocks(T[s.kappa])},
          {"power", s.embedding.power()}, {"minimal", s.embedding.minimal}, {"route", s.route}};
}

Json ledger_json(const SplitLedger& ledger) {
  Json entries = Json::array();
  for (const auto& en : ledger.entries) {
    const auto T = CommutatorTable::compute(en.subalgebra.algebra);
    Json elems = Json::array();
    for (std::size_t i = 0; i < en.subalgebra.universe.size(); ++i) elems.push_back(en.subalgebra.global(i)[0]);
    Json j = {{"subalgebra", elems},
              {"delta", blocks(en.delta)},
              {"theta", blocks(en.theta)},
              {"nu", blocks(en.nu)},
              {"split", en.split ? split_json(T, *en.split) : Json(nullptr)}};
    j["least_power"] = en.least_power ? Json(*en.least_power) : Json(nullptr);
    j["least_power_exact"] = en.least_power_exact;
    entries.push_back(std::move(j));
  }
  return {{"pass", ledger.pass()}, {"entries", entries}};
}

Json constants_json(const Constants& c) {
  Json j = {{"automorphisms", c.automorphisms}, {"sections", c.sections}, {"power", c.power},
            {"exponent", c.exponent}, {"arity_bound", c.arity_bound}};
  j["index_bound"] = c.index_bound ? Json(*c.index_bound) : Json(nullptr);
  j["index_bound_power"] = {{"base", c.index_base}, {"exponent", c.index_exponent}};
  j["degenerate"] = c.degenerate;
  j["power_is_upper_bound"] = c.power_is_upper_bound;
  j["exponent_is_lower_bound"] = c.exponent_is_lower_bound;
  j["notes"] = c.notes;
  return j;
}

Json checks_json(const std::vector<std::pair<std::string, bool>>& items) {
  Json j = Json::array();
  for (const auto& [name, ok] : items) j.push_back({{"check", name}, {"ok", ok}});
  return j;
}

Json report_json(const DerivationReport& rep) {
  Json counts = Json::object();
  for (std::size_t k = 0; k < DerivationStep::kKinds; ++k)
    counts[kind_name(static_cast<DerivationStep::Kind>(k))] = rep.step_counts[k];
  Json j = {{"accepted", rep.accepted}, {"step_counts", counts},
            {"bijective_projections", rep.bijective_projections},
            {"retractive_projections", rep.retractive_projections}};
  j["failed_step"] = rep.failed_step ? Json(*rep.failed_step) : Json(nullptr);
  j["reason"] = rep.reason;
  return j;
}

void write_certificate(const std::string& path, const AxiomSet& axioms, const Relation& goal, const Derivation& d) {
  io::write_file(path, {{"axioms", io::to_json(axioms)}, {"goal", io::to_json(goal)}, {"derivation", io::to_json(d)}});
}

// ---------------------------------------------------------------- commands

Json cmd_inspect(Context& c) {
  const Algebra& A = c.algebra();
  const auto L = CongruenceLattice::compute(A, c.budget);
  Json ops = Json::array();
  for (const auto& op : A.ops()) ops.push_back({{"name", op.name}, {"arity", op.arity}});
  const auto mono = L.monolith();
  Json j = {{"name", A.name()},
            {"size", A.size()},
            {"ops", ops},
            {"congruences", L.size()},
            {"simple", L.size() == 2},
            {"subdirectly_irreducible", mono.has_value()}};
  j["monolith"] = mono ? blocks(L[*mono]) : Json(nullptr);
  j["subalgebras"] = subalgebras(A, c.budget).size();
  return j;
}

Json cmd_con(Context& c) {
  const auto L = CongruenceLattice::compute(c.algebra(), c.budget);
  const auto mi = L.meet_irreducibles();
  Json elems = Json::array();
  for (std::size_t i = 0; i < L.size(); ++i)
    elems.push_back({{"index", i},
                     {"blocks", blocks(L[i])},
                     {"upper_covers", L.upper_covers(i)},
                     {"meet_irreducible", std::find(mi.begin(), mi.end(), i) != mi.end()}});
  Json j = {{"size", L.size()}, {"elements", elems}, {"principal", L.principal()}};
  const auto mono = L.monolith();
  j["monolith"] = mono ? Json(*mono) : Json(nullptr);
  return j;
}

Json cmd_commutator(Context& c) {
  const Algebra& A = c.algebra();
  const auto L = CongruenceLattice::compute(A, c.budget);
  if (!c.opt.alpha.empty() || !c.opt.beta.empty()) {
    const std::size_t a = resolve_partition(c.opt.alpha.empty() ? "1" : c.opt.alpha, L, "--alpha");
    const std::size_t b = resolve_partition(c.opt.beta.empty() ? "1" : c.opt.beta, L, "--beta");
    const Partition comm = commutator(A, L[a], L[b], c.budget);
    return {{"alpha", blocks(L[a])}, {"beta", blocks(L[b])}, {"commutator", blocks(comm)},
            {"index", L.index(comm)}};
  }
  const std::size_t n = L.size();
  std::vector<std::size_t> table(n * n);
  parallel_for(c.opt.jobs, n * n, [&](std::size_t k) {
    table[k] = L.index(commutator(A, L[k / n], L[k % n], c.budget));
  });
  Json rows = Json::array();
  for (std::size_t a = 0; a < n; ++a)
    rows.push_back(std::vector<std::size_t>(table.begin() + static_cast<std::ptrdiff_t>(a * n),
                                            table.begin() + static_cast<std::ptrdiff_t>((a + 1) * n)));
  Json congs = Json::array();
  for (std::size_t i = 0; i < n; ++i) congs.push_back(blocks(L[i]));
  return {{"congruences", congs}, {"table", rows}};
}

Json cmd_centralizer(Context& c) {
  const Algebra& A = c.algebra();
  const CmGuard guard = c.guard();
  const auto T = CommutatorTable::compute(A, c.budget);
  const std::size_t beta = resolve_partition(c.opt.beta.empty() ? "0" : c.opt.beta, T.lattice(), "--beta");
  const std::size_t alpha = resolve_partition(c.opt.alpha.empty() ? "1" : c.opt.alpha, T.lattice(), "--alpha");
  const std::size_t cz = T.centralizer(beta, alpha, guard);
  return {{"beta", blocks(T[beta])}, {"alpha", blocks(T[alpha])}, {"centralizer", blocks(T[cz])},
          {"guard", guard.evidence()}};
}

Json cmd_terms(Context& c) {
  const Algebra& A = c.algebra();
  const auto prof = parallelogram_profile(A, c.opt.k_max, c.budget);
  Json rows = Json::array();
  for (std::size_t k = 2; k <= c.opt.k_max; ++k)
    rows.push_back({{"k", k}, {"splits", prof.exists.at(k - 2)}});
  Json j = {{"k_max", c.opt.k_max}, {"parallelogram", rows}};
  const auto least = prof.least_k();
  j["least_k"] = least ? Json(*least) : Json(nullptr);
  const auto w = least_parallelogram_term(A, c.opt.k_max, c.budget);
  j["witness"] = w ? witness_json(A, *w) : Json(nullptr);
  const auto m = has_maltsev_term(A, c.budget);
  j["maltsev"] = m ? witness_json(A, *m) : Json(nullptr);
  if (c.opt.nu >= 3) {
    const auto nu = has_nu_term(A, c.opt.nu, c.budget);
    j["near_unanimity"] = nu ? witness_json(A, *nu) : Json(nullptr);
  }
  return j;
}

Json cmd_critical(Context& c) {
  const Algebra& A = c.algebra();
  const Relation R = c.relation();
  if (!is_compatible(A, R, c.budget)) throw HypothesisError("relation is not compatible");
  const auto v = is_critical(A, R, c.budget);
  Json j = {{"arity", R.arity()}, {"size", R.size()}, {"irreducible", v.irreducible},
            {"indecomposable", v.indecomposable}, {"critical", v.critical()}, {"full_relation", v.full_relation}};
  j["irreducibility_witness"] = v.irreducibility_witness ? Json(*v.irreducibility_witness) : Json(nullptr);
  j["factorization"] = v.factorization ? Json{v.factorization->first, v.factorization->second} : Json(nullptr);
  return j;
}

Json cmd_reduce_rep(Context& c) {
  const Algebra& A = c.algebra();
  const Relation C = c.relation();
  const auto rep = reduced_representation(A, C, c.guard(), c.budget);
  Json factors = Json::array();
  std::vector<std::size_t> cls(rep.factors.size());
  for (std::size_t i = 0; i < rep.factors.size(); ++i) {
    const auto& f = rep.factors[i];
    Json elems = Json::array();
    for (std::size_t x = 0; x < f.algebra.universe.size(); ++x) elems.push_back(f.algebra.global(x)[0]);
    factors.push_back({{"universe", elems},
                       {"delta", blocks(f.table[f.delta])},
                       {"theta", blocks(f.table[f.theta])},
                       {"nu", blocks(f.table[f.nu])},
                       {"degenerate", f.degenerate},
                       {"abelian", f.abelian}});
    cls[i] = i;
    for (std::size_t j = 0; j < i; ++j)
      if (rep.same_coordinate_class(j, i)) {
        cls[i] = cls[j];
        break;
      }
  }
  return {{"factors", factors}, {"degenerate", rep.degenerate()}, {"all_relevant", rep.all_relevant()},
          {"coordinate_classes", cls}};
}

Json cmd_split_check(Context& c) {
  const auto ledger = split_centralizer_condition(c.algebra(), c.guard(), c.budget);
  return ledger_json(ledger);
}

Json cmd_constants(Context& c) {
  const Algebra& A = c.algebra();
  const TermWitness w = c.parallelogram();
  const auto ledger = split_centralizer_condition(A, cm_guard(w), c.budget);
  const auto k = constants(A, w.k, ledger, c.budget);
  Json j = constants_json(k);
  j["k"] = w.k;
  return j;
}

Json cmd_reduce(Context& c) {
  const Algebra& A = c.algebra();
  const Relation C = c.relation();
  ReductionOptions ro;
  ro.budget = c.budget;
  const auto r = build_reduction(A, C, c.parallelogram(), ro);
  std::size_t max_power = 0;
  for (const auto& s : r.splits) max_power = std::max(max_power, s.embedding.power());
  const auto cl = verify_reduction_claims(A, r, max_power, c.opt.index_bound, c.budget);
  Json factors = Json::array();
  for (const auto& f : r.star.factors)
    factors.push_back({{"power", f.algebra.power()}, {"size", f.algebra.algebra.size()}, {"alpha", blocks(f.alpha)}});
  Json j = {{"arity", C.arity()},
            {"triple_class", r.triple_class},
            {"coordinate_class", r.coordinate_class},
            {"transversal", r.transversal},
            {"lifted_size", r.lifted.size()},
            {"star", {{"arity", r.star.star_arity()}, {"index", r.star.alpha_index()}, {"size", r.star.relation.size()},
                      {"factors", factors}}},
            {"witness_size", r.witness.size()},
            {"derivation_steps", r.derivation.steps.size()},
            {"axioms", r.axioms.size()}};
  j["claims"] = checks_json({{"classwise_alpha", cl.classwise_alpha},
                             {"lift_exists", cl.lift_exists},
                             {"lift_unique", cl.lift_unique},
                             {"d_subdirect", cl.d_subdirect},
                             {"d_compatible", cl.d_compatible},
                             {"transversal_projection", cl.transversal_projection},
                             {"beta_saturation", cl.beta_saturation},
                             {"kappa_saturation", cl.kappa_saturation},
                             {"index_bounds", cl.index_bounds},
                             {"inverse_image", cl.inverse_image},
                             {"index_equality", cl.index_equality},
                             {"star_conditions", cl.star_conditions},
                             {"witness_onto", cl.witness_onto},
                             {"witness_injective", cl.witness_injective},
                             {"derivation_accepted", cl.derivation_accepted}});
  j["claims_ok"] = cl.ok();
  j["failures"] = cl.failures;
  if (!c.opt.certificate.empty()) {
    write_certificate(c.opt.certificate, r.axioms, C, r.derivation);
    j["certificate"] = c.opt.certificate;
  }
  return j;
}

Json cmd_lm_reduce(Context& c) {
  const Algebra& A = c.algebra();
  const StarRelation B = c.star();
  const auto m = has_maltsev_term(A, c.budget);
  if (!m) throw HypothesisError("lm-reduce needs a Maltsev term");
  const Term& d = m->derivation;
  if (c.opt.iterate) {
    const auto it = iterate_reduction(A, B, d, c.opt.exponent, c.opt.floor, c.budget);
    Json steps = Json::array();
    for (const auto& [before, after] : it.steps) steps.push_back({before, after});
    Json j = {{"star_arity", B.star_arity()}, {"rounds", it.rounds}, {"arities", it.arities},
              {"steps", steps}, {"components", it.components}, {"axioms", it.axioms.size()},
              {"certificate_steps", it.derivation.steps.size()}, {"replay", report_json(it.replay)}};
    std::size_t max_arity = 0;
    for (const auto& [name, rel] : it.axioms) max_arity = std::max(max_arity, rel.arity());
    j["max_axiom_arity"] = max_arity;
    if (!c.opt.certificate.empty()) {
      write_certificate(c.opt.certificate, it.axioms, B.relation, it.derivation);
      j["certificate"] = c.opt.certificate;
    }
    return j;
  }
  const auto r = lm_main_reduce(A, B, d, c.opt.exponent, c.budget);
  Json j = {{"star_arity", B.star_arity()}, {"applicable", r.applicable}, {"reason", r.reason}};
  if (!r.applicable) return j;
  j["block"] = r.block;
  j["permutation"] = r.permutation;
  j["distinct_maps"] = r.maps.distinct();
  j["tuples_checked"] = r.tuples_checked;
  j["collapsed"] = r.collapsed;
  j["reduced_star_arity"] = r.reduced.star_arity();
  j["reduced_size"] = r.reduced.relation.size();
  j["checks"] = checks_json({{"alpha_related", r.alpha_related},
                             {"y_equivalence", r.y_equivalence},
                             {"y_is_sum", r.y_is_sum},
                             {"w_injective", r.w_injective},
                             {"w_onto", r.w_onto}});
  j["ok"] = r.ok();
  if (!c.opt.output.empty()) {
    io::write_file(c.opt.output, io::to_json(r.reduced));
    j["output"] = c.opt.output;
  }
  return j;
}

Json cmd_dualizability(Context& c) {
  const auto rep = dualizability_report(c.algebra(), c.opt.k_max, c.budget);
  Json j = {{"verdict", verdict_name(rep.verdict)}};
  j["parallelogram_k"] = rep.parallelogram_k ? Json(*rep.parallelogram_k) : Json(nullptr);
  j["residually_small"] = rep.residually_small;
  Json sis = Json::array();
  for (const auto& [name, cls] : rep.si_sections) sis.push_back({{"section", name}, {"class", si_class_name(cls)}});
  j["si_sections"] = sis;
  j["ledger"] = rep.ledger ? ledger_json(*rep.ledger) : Json(nullptr);
  j["constants"] = rep.constants ? constants_json(*rep.constants) : Json(nullptr);
  j["evidence"] = rep.evidence;
  return j;
}

Json cmd_check_derivation(Context& c) {
  const Algebra& A = c.algebra();
  if (c.opt.certificate.empty()) throw ParseError("--certificate is required");
  const Json cert = c.load(c.opt.certificate);
  AxiomSet axioms;
  Relation goal;
  Derivation d;
  try {
    axioms = io::axioms_from_json(cert.at("axioms"));
    goal = io::relation_from_json(cert.at("goal"));
    d = io::derivation_from_json(cert.at("derivation"));
  } catch (const Json::exception& e) {
    throw ParseError(c.opt.certificate + ": " + e.what());
  }
  return report_json(check_derivation(A, axioms, d, goal, c.budget));
}

Json cmd_sylow(Context& c) { return {{"abelian_sylow_subgroups", sylow_abelian_check(c.algebra())}}; }

const std::map<std::string, std::function<Algebra()>>& corpus_table() {
  static const std::map<std::string, std::function<Algebra()>> table = {
      {"Z1", corpus::trivial_group},
      {"Z2", [] { return corpus::cyclic_group(2); }},
      {"Z3", [] { return corpus::cyclic_group(3); }},
      {"Z4", [] { return corpus::cyclic_group(4); }},
      {"Z2xZ2", corpus::klein_group},
      {"S3", corpus::symmetric_group3},
      {"S3c", corpus::symmetric_group3_with_constants},
      {"D4", corpus::dihedral_group4},
      {"L2", corpus::two_element_lattice},
      {"SL2", corpus::two_element_semilattice},
      {"T1", corpus::trivial_algebra},
  };
  return table;
}

// Indented key: value text, scalars and scalar arrays on one line.
void render_text(std::ostream& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  const auto flat = [](const Json& v) {
    if (!v.is_structured()) return true;
    if (v.is_object()) return v.empty();
    return std::all_of(v.begin(), v.end(), [](const Json& x) {
      return !x.is_object() && (!x.is_array() || std::none_of(x.begin(), x.end(), [](const Json& y) {
        return y.is_object();
      }));
    });
  };
  const auto scalar = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (flat(v)) {
        out << pad << k << ": " << scalar(v) << '\n';
      } else {
        out << pad << k << ":\n";
        render_text(out, v, indent + 2);
      }
    }
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (flat(v)) {
        out << pad << "- " << scalar(v) << '\n';
      } else {
        out << pad << "-\n";
        render_text(out, v, indent + 2);
      }
    }
  } else {
    out << pad << scalar(j) << '\n';
  }
}

std::optional<std::size_t> env_budget() {
  const char* v = std::getenv("ALGWB_BUDGET");
  if (!v || !*v) return std::nullopt;
  std::size_t pos = 0;
  std::size_t n = 0;
  try {
    n = std::stoul(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || v[pos] != '\0') throw ParseError(std::string("ALGWB_BUDGET is not a number: '") + v + "'");
  return n;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Finite algebra workbench: congruences, commutators, terms, relations and dualizability checks"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--budget", opt.budget, "Object limit per enumeration (default: ALGWB_BUDGET or 4000000)");
  app.add_flag("--json", opt.json, "Emit the report as JSON");
  app.add_option("--jobs", opt.jobs, "Worker threads for independent computations")->check(CLI::PositiveNumber);
  app.add_flag("--timing", opt.timing, "Include wall-clock timing in the report");

  using Handler = Json (*)(Context&);
  std::vector<std::pair<CLI::App*, Handler>> commands;
  const auto add = [&](const char* name, const char* help, Handler h) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("algebra", opt.algebra, "Algebra file")->required();
    commands.emplace_back(sub, h);
    return sub;
  };
  const auto k_max = [&](CLI::App* s) { s->add_option("--k-max", opt.k_max, "Largest parallelogram k tried"); };
  const auto relation = [&](CLI::App* s, bool required) {
    auto* o = s->add_option("--relation", opt.relation, "Relation file");
    if (required) o->required();
  };

  add("inspect", "Universe, operations and basic lattice data", cmd_inspect);
  add("con", "Congruence lattice listing", cmd_con);
  {
    auto* s = add("commutator", "Commutator of two congruences, or the full table", cmd_commutator);
    s->add_option("--alpha", opt.alpha, "Congruence: 0, 1, #index or a JSON block list");
    s->add_option("--beta", opt.beta, "Congruence: 0, 1, #index or a JSON block list");
  }
  {
    auto* s = add("centralizer", "Centralizer (beta : alpha); defaults give the center", cmd_centralizer);
    s->add_option("--alpha", opt.alpha, "Congruence (default 1)");
    s->add_option("--beta", opt.beta, "Congruence (default 0)");
    k_max(s);
  }
  {
    auto* s = add("terms", "Parallelogram, Maltsev and near-unanimity terms", cmd_terms);
    k_max(s);
    s->add_option("--nu", opt.nu, "Also search a near-unanimity term of this arity");
  }
  relation(add("critical", "Critical relation test", cmd_critical), true);
  {
    auto* s = add("reduce-rep", "Reduced representation of a critical relation", cmd_reduce_rep);
    relation(s, true);
    k_max(s);
  }
  k_max(add("split-check", "Split centralizer condition ledger", cmd_split_check));
  k_max(add("constants", "Bounding constants", cmd_constants));
  {
    auto* s = add("reduce", "Replace a critical relation by a bounded-index abelian one", cmd_reduce);
    relation(s, true);
    k_max(s);
    s->add_option("--certificate", opt.certificate, "Write the derivation certificate here");
    s->add_option("--index-bound", opt.index_bound, "Also check the index against this bound");
  }
  {
    auto* s = add("lm-reduce", "Arity reduction of an abelian relation", cmd_lm_reduce);
    relation(s, true);
    s->add_option("--exponent", opt.exponent, "Block parameter (at least 2)");
    s->add_flag("--iterate", opt.iterate, "Iterate and emit a certificate");
    s->add_option("--floor", opt.floor, "Stop iterating at this star arity");
    s->add_option("--certificate", opt.certificate, "Write the certificate here (with --iterate)");
    s->add_option("--output", opt.output, "Write the reduced relation here");
  }
  k_max(add("dualizability", "Dualizability verdict with its ledger", cmd_dualizability));
  {
    auto* s = add("check-derivation", "Replay a derivation certificate", cmd_check_derivation);
    s->add_option("--certificate", opt.certificate, "Certificate file {axioms, goal, derivation}")->required();
  }
  add("sylow", "Abelian Sylow subgroup check for groups", cmd_sylow);
  CLI::App* corpus_cmd = app.add_subcommand("corpus", "List built-in algebras or print one as an algebra file");
  corpus_cmd->add_option("name", opt.corpus_name, "Algebra name");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kParseError;
  }

  if (corpus_cmd->parsed()) {
    const auto& table = corpus_table();
    if (opt.corpus_name.empty()) {
      for (const auto& [name, make] : table) out << name << '\n';
      return kOk;
    }
    auto it = table.find(opt.corpus_name);
    if (it == table.end()) {
      err << "error: unknown corpus algebra '" << opt.corpus_name << "'\n";
      return kParseError;
    }
    out << io::to_json(it->second()).dump(2) << '\n';
    return kOk;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    Context ctx(opt);
    if (opt.budget)
      ctx.budget.limit = *opt.budget;
    else if (auto b = env_budget())
      ctx.budget.limit = *b;
    Json result;
    std::string name;
    for (const auto& [sub, handler] : commands)
      if (sub->parsed()) {
        name = sub->get_name();
        result = handler(ctx);
      }
    Json report = {{"command", name}, {"arguments", args}, {"inputs", ctx.inputs},
                   {"budget", ctx.budget.limit}, {"result", result}};
    if (opt.timing) {
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
      report["timing"] = {{"seconds", dt.count()}};
    }
    if (opt.json)
      out << report.dump(2) << '\n';
    else
      render_text(out, report, 0);
    return kOk;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParseError;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kBudgetExceeded;
  } catch (const HypothesisError& e) {
    err << "hypothesis violated: " << e.what() << '\n';
    return kHypothesisError;
  } catch (const std::invalid_argument& e) {
    err << "hypothesis violated: " << e.what() << '\n';
    return kHypothesisError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace algwb::cli
