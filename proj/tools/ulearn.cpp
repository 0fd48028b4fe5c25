// Command-line front end.  Exit codes: 0 success, 1 usage or format error,
// 2 unsupported input, 3 internal invariant violation.

#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "ulearn/bfgame.hpp"
#include "ulearn/json_io.hpp"
#include "ulearn/learn.hpp"
#include "ulearn/order_expr.hpp"
#include "ulearn/parallel.hpp"
#include "ulearn/sessions.hpp"
#include "ulearn/trees.hpp"

#include <omp.h>

using namespace ulearn;

namespace {

constexpr int kUsage = 1;
constexpr int kUnsupported = 2;
constexpr int kInternal = 3;

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto dash = item.find('-');
    try {
      if (dash != std::string::npos) {
        auto lo = std::stoull(item.substr(0, dash)), hi = std::stoull(item.substr(dash + 1));
        if (hi < lo) throw FormatError("bad seed range '" + item + "'");
        for (auto k = lo; k <= hi; ++k) out.push_back(k);
      } else {
        out.push_back(std::stoull(item));
      }
    } catch (const std::logic_error&) {
      throw FormatError("bad seed list '" + s + "'");
    }
  }
  if (out.empty()) throw FormatError("seed list is empty");
  return out;
}

std::vector<Sigma2Sentence> load_sentences(const std::string& path) {
  Json j = load_json(path);
  std::vector<Sigma2Sentence> out;
  if (j.is_array()) {
    for (const auto& s : j) out.push_back(sentence_from_json(s));
  } else {
    out.push_back(sentence_from_json(j));
  }
  return out;
}

StructureDescriptor load_descriptor(const std::string& path) {
  auto s = load_structure(path);
  if (!std::holds_alternative<StructureDescriptor>(s)) throw FormatError("'" + path + "' is not a descriptor");
  return std::get<StructureDescriptor>(s);
}

Translation translation_named(const std::string& name, unsigned cap) {
  if (name == "identity" || name == "none") return identity_translation();
  if (name == "freeze") return freeze_translation();
  if (name == "min_iso") return min_iso_translation();
  if (name == "equiv2") return equiv2_translation(BfConfig{cap});
  throw FormatError("unknown translation '" + name + "'");
}

// --- bf --------------------------------------------------------------------------

struct BfArgs {
  std::string left, right;
  unsigned n = 1;
  unsigned cap = 4;
};

int cmd_bf(const BfArgs& a) {
  auto l = load_structure(a.left);
  auto r = load_structure(a.right);
  Json out{{"relation", "leq_n"}, {"n", a.n}, {"left", a.left}, {"right", a.right}};
  bool result;
  std::string mode;
  if (std::holds_alternative<Snapshot>(l) && std::holds_alternative<Snapshot>(r)) {
    const auto& ls = std::get<Snapshot>(l);
    const auto& rs = std::get<Snapshot>(r);
    if (!(ls.vocab() == rs.vocab())) throw FormatError("vocabulary mismatch");
    result = leq_n_snapshots({ls, {}}, {rs, {}}, a.n);
    mode = "snapshot-game";
  } else if (std::holds_alternative<StructureDescriptor>(l) && std::holds_alternative<StructureDescriptor>(r)) {
    const auto& ld = std::get<StructureDescriptor>(l);
    const auto& rd = std::get<StructureDescriptor>(r);
    if (ld.is_unary() != rd.is_unary()) throw FormatError("cannot compare a unary descriptor with an order");
    result = leq_n_described(ld, rd, a.n, BfConfig{a.cap});
    mode = ld.is_unary() ? "unary-counts" : "interval-profiles";
  } else {
    throw FormatError("both sides must be snapshots or both descriptors");
  }
  out["result"] = result;
  out["cap"] = a.cap;
  out["mode"] = mode;
  print(out);
  return 0;
}

// --- learn -----------------------------------------------------------------------

struct LearnArgs {
  std::string family, target, sentences, learner = "qss", translate = "none", seeds = "0";
  std::int64_t target_index = -1;
  std::uint64_t horizon = 100, window = 10;
  unsigned cap = 4, tuple_bound = 2;
  int jobs = 1;
};

int cmd_learn(const LearnArgs& a) {
  Family fam = family_from_json(load_json(a.family));
  StructureDescriptor target = a.target_index >= 0 ? fam.member(static_cast<std::uint64_t>(a.target_index))
                                                   : load_descriptor(a.target);
  Learner base = Learner::constant(0);
  if (a.learner == "qss") {
    base = a.sentences.empty() ? family_qss_learner(fam, a.tuple_bound, a.cap) : qss_learner(load_sentences(a.sentences));
  } else if (a.learner == "counter") {
    auto s = load_sentences(a.sentences);
    if (s.size() != 2) throw FormatError("counter learner needs exactly two sentences");
    base = counter_learner(s[0], s[1]);
  } else if (a.learner != "zero") {
    throw FormatError("unknown learner '" + a.learner + "'");
  }
  Learner l = translation_named(a.translate, a.cap)(fam, base);
  auto seeds = parse_seeds(a.seeds);
  if (a.jobs > 0) omp_set_num_threads(a.jobs);
  auto results = a.jobs > 1 ? session_sweep_parallel(fam, target, l, a.horizon, seeds)
                            : session_sweep_serial(fam, target, l, a.horizon, seeds);
  Json sessions = Json::array();
  for (auto& r : results) {
    r.family_ref = a.family;
    Json j = to_json(r);
    auto ex = evaluate_success_report(r, fam, target, SuccessMode::Ex, 0);
    auto bc = evaluate_success_report(r, fam, target, SuccessMode::Bc, std::min(a.window, r.horizon));
    j["ex_at_horizon"] = ex.success;
    j["bc_at_horizon"] = bc.success;
    if (!ex.diagnostic.empty()) j["ex_diagnostic"] = ex.diagnostic;
    if (!bc.diagnostic.empty()) j["bc_diagnostic"] = bc.diagnostic;
    sessions.push_back(j);
  }
  print(Json{{"learner", a.learner}, {"translate", a.translate}, {"window", a.window}, {"sessions", sessions}});
  return 0;
}

// --- check -----------------------------------------------------------------------

int cmd_check(const std::string& family, unsigned tuple_bound, unsigned cap) {
  Family fam = family_from_json(load_json(family));
  const auto& v = fam.base().front().vocab();
  auto dump = [&](const std::vector<std::optional<TupleAbstraction>>& ws) {
    Json out = Json::array();
    for (const auto& w : ws) out.push_back(w ? to_json(*w, v) : Json(nullptr));
    return out;
  };
  auto w3 = condition3_witnesses(fam, tuple_bound, cap);
  Json out{{"condition3", std::all_of(w3.begin(), w3.end(), [](const auto& x) { return x.has_value(); })},
           {"condition3a", nullptr},
           {"witnesses3", dump(w3)}};
  try {
    auto w3a = condition3a_witnesses(fam, tuple_bound, cap);
    out["condition3a"] = std::all_of(w3a.begin(), w3a.end(), [](const auto& x) { return x.has_value(); });
    out["witnesses3a"] = dump(w3a);
  } catch (const std::invalid_argument& e) {
    out["condition3a_error"] = e.what();
  }
  out["tuple_bound"] = tuple_bound;
  out["cap"] = cap;
  print(out);
  return 0;
}

// --- swap ------------------------------------------------------------------------

struct SwapArgs {
  std::string a1, a2, psi, theta, translate = "freeze", seeds = "0";
  std::uint64_t horizon = 100;
  unsigned cap = 4;
};

int cmd_swap(const SwapArgs& a) {
  auto d1 = load_descriptor(a.a1);
  auto d2 = load_descriptor(a.a2);
  auto psi = load_sentences(a.psi);
  auto theta = load_sentences(a.theta);
  if (psi.size() != 1 || theta.size() != 1) throw FormatError("psi and theta files hold one sentence each");
  Verdict v = swap_experiment(translation_named(a.translate, a.cap), d1, d2, psi[0], theta[0], a.horizon,
                              parse_seeds(a.seeds), BfConfig{a.cap});
  Json out = to_json(v);
  out["horizon"] = a.horizon;
  out["translate"] = a.translate;
  print(out);
  return 0;
}

// --- algebra ---------------------------------------------------------------------

int cmd_algebra(const std::string& text, std::int64_t random_seed, bool json) {
  OrderExpr e = parse_expr(text);
  OrderExpr nf;
  if (random_seed >= 0) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(random_seed));
    nf = normalize_random(e, rng);
  } else {
    nf = normalize(e);
  }
  if (json)
    print(Json{{"input", to_string(e)}, {"normal_form", to_string(nf)}, {"cardinality", cardinality(nf).str()}});
  else
    std::cout << to_string(nf) << "\n";
  return 0;
}

// --- kb --------------------------------------------------------------------------

int cmd_kb(const std::string& tree, const std::vector<std::string>& interleave) {
  if (!interleave.empty()) {
    if (interleave.size() != 2) throw FormatError("--interleave takes two tree files");
    print(to_json(interleave_trees(tree_from_json(load_json(interleave[0])), tree_from_json(load_json(interleave[1])))));
    return 0;
  }
  if (tree.empty()) throw FormatError("kb needs --tree or --interleave");
  FinTree t = tree_from_json(load_json(tree));
  Json nodes = Json::array();
  for (const auto& s : t.nodes()) nodes.push_back(s);
  print(Json{{"nodes", nodes}, {"order", to_json(kb_linearize(t))}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ulearn: learning-in-the-limit and back-and-forth toolkit"};
  app.require_subcommand(1);

  BfArgs bf;
  auto* bf_cmd = app.add_subcommand("bf", "decide (left) ≤n (right)");
  bf_cmd->add_option("--left", bf.left, "structure file (snapshot/descriptor JSON or .ord)")->required();
  bf_cmd->add_option("--right", bf.right, "structure file")->required();
  bf_cmd->add_option("--n", bf.n, "back-and-forth level")->required();
  bf_cmd->add_option("--cap", bf.cap, "finite cap for described structures")->check(CLI::PositiveNumber);

  LearnArgs ln;
  auto* learn_cmd = app.add_subcommand("learn", "run learning sessions");
  learn_cmd->add_option("--family", ln.family, "family JSON")->required();
  learn_cmd->add_option("--target", ln.target, "target descriptor file");
  learn_cmd->add_option("--target-index", ln.target_index, "use family member as target");
  learn_cmd->add_option("--learner", ln.learner, "qss | counter | zero");
  learn_cmd->add_option("--sentences", ln.sentences, "sentence JSON (list)");
  learn_cmd->add_option("--translate", ln.translate, "none | min_iso | equiv2 | freeze");
  learn_cmd->add_option("--horizon", ln.horizon)->check(CLI::PositiveNumber);
  learn_cmd->add_option("--window", ln.window);
  learn_cmd->add_option("--seeds", ln.seeds, "comma list, ranges a-b allowed");
  learn_cmd->add_option("--cap", ln.cap)->check(CLI::PositiveNumber);
  learn_cmd->add_option("--tuple-bound", ln.tuple_bound)->check(CLI::PositiveNumber);
  learn_cmd->add_option("--jobs", ln.jobs, "parallel sessions")->check(CLI::PositiveNumber);

  std::string check_family;
  unsigned check_tb = 2, check_cap = 4;
  auto* check_cmd = app.add_subcommand("check", "decide conditions (3) and (3a) on a family");
  check_cmd->add_option("--family", check_family)->required();
  check_cmd->add_option("--tuple-bound", check_tb)->check(CLI::PositiveNumber);
  check_cmd->add_option("--cap", check_cap)->check(CLI::PositiveNumber);

  SwapArgs sw;
  auto* swap_cmd = app.add_subcommand("swap", "run the swap adversary against a translation");
  swap_cmd->add_option("--a1", sw.a1)->required();
  swap_cmd->add_option("--a2", sw.a2)->required();
  swap_cmd->add_option("--psi", sw.psi, "Σ2 sentence for A1")->required();
  swap_cmd->add_option("--theta", sw.theta, "Σ2 sentence for A2")->required();
  swap_cmd->add_option("--translate", sw.translate, "freeze | identity | min_iso | equiv2");
  swap_cmd->add_option("--horizon", sw.horizon)->check(CLI::PositiveNumber);
  swap_cmd->add_option("--seeds", sw.seeds);
  swap_cmd->add_option("--cap", sw.cap)->check(CLI::PositiveNumber);

  std::string expr;
  std::int64_t random_seed = -1;
  bool algebra_json = false;
  auto* alg_cmd = app.add_subcommand("algebra", "normalize an order expression");
  alg_cmd->add_option("expr", expr)->required();
  alg_cmd->add_option("--random-seed", random_seed, "rewrite redexes in random order");
  alg_cmd->add_flag("--json", algebra_json);

  std::string tree;
  std::vector<std::string> interleave;
  auto* kb_cmd = app.add_subcommand("kb", "Kleene–Brouwer linearization or interleaving");
  kb_cmd->add_option("--tree", tree);
  kb_cmd->add_option("--interleave", interleave)->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*bf_cmd) return cmd_bf(bf);
    if (*learn_cmd) {
      if (ln.target.empty() && ln.target_index < 0) throw FormatError("learn needs --target or --target-index");
      return cmd_learn(ln);
    }
    if (*check_cmd) return cmd_check(check_family, check_tb, check_cap);
    if (*swap_cmd) return cmd_swap(sw);
    if (*alg_cmd) return cmd_algebra(expr, random_seed, algebra_json);
    if (*kb_cmd) return cmd_kb(tree, interleave);
  } catch (const Unsupported& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kUnsupported;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
