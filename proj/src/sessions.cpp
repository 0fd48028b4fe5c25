#include "ulearn/sessions.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace ulearn {

std::optional<std::uint64_t> stabilization_point(const std::vector<std::uint64_t>& trace) {
  if (trace.empty()) return std::nullopt;
  const std::size_t h = trace.size() - 1;
  if (h > 0 && trace[h] != trace[h - 1]) return std::nullopt;
  std::size_t t = h;
  while (t > 0 && trace[t - 1] == trace[h]) --t;
  return t;
}

SessionResult run_session(const Family& fam, const PresentationStream& p, const Learner& l,
                          std::uint64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  (void)fam;
  SessionResult r;
  r.horizon = horizon;
  r.presentation_ref = "seed:" + std::to_string(p.seed());
  Snapshot full = restrict(p, horizon);
  Learner run = l.fresh();
  for (std::uint64_t n = 0; n <= horizon; ++n) r.trace.push_back(run(full.induced(static_cast<std::uint32_t>(n + 1))));
  r.stabilized_at = stabilization_point(r.trace);
  r.final = r.trace.back();
  return r;
}

SuccessReport evaluate_success_report(const SessionResult& r, const Family& fam, const StructureDescriptor& truth,
                                      SuccessMode mode, std::uint64_t window) {
  if (window > r.horizon) throw std::invalid_argument("window exceeds the horizon");
  if (r.trace.size() != r.horizon + 1) throw std::invalid_argument("trace length does not match the horizon");
  std::map<std::size_t, bool> memo;
  auto correct = [&](std::uint64_t i) {
    std::size_t b = fam.base_index(i);
    auto it = memo.find(b);
    if (it == memo.end()) it = memo.emplace(b, iso_described(fam.base()[b], truth)).first;
    return it->second;
  };
  if (mode == SuccessMode::Ex) {
    if (!r.stabilized_at) return {false, "no stabilization at horizon"};
    if (!correct(r.final)) return {false, "stabilized at horizon on a non-isomorphic member"};
    return {true, ""};
  }
  for (std::uint64_t n = r.horizon - window; n <= r.horizon; ++n)
    if (!correct(r.trace[n])) return {false, "incorrect hypothesis at stage " + std::to_string(n)};
  return {true, ""};
}

bool evaluate_success(const SessionResult& r, const Family& fam, const StructureDescriptor& truth, SuccessMode mode,
                      std::uint64_t window) {
  return evaluate_success_report(r, fam, truth, mode, window).success;
}

// --- swap adversary --------------------------------------------------------------

Translation identity_translation() {
  return [](const Family&, const Learner& l) { return l; };
}

Translation freeze_translation() {
  return [](const Family&, const Learner& l) {
    return Learner([l]() -> Learner::Step {
      auto inner = l.fresh();
      return [inner](const Snapshot& s) { return inner(s.induced(1)); };
    });
  };
}

Translation min_iso_translation() {
  return [](const Family& f, const Learner& l) { return min_iso_translate(f, l); };
}

Translation equiv2_translation(BfConfig cfg) {
  return [cfg](const Family& f, const Learner& l) { return equiv2_translate(f, l, cfg); };
}

Family swapped_parity_family(const StructureDescriptor& a1, const StructureDescriptor& a2, std::uint64_t n) {
  FamilyPattern p;
  p.tail_kind = FamilyPattern::Tail::Parity;
  for (std::uint64_t i = 0; i <= n; ++i) p.initial.push_back(i % 2);
  p.initial[n] = n % 2 == 0 ? 1 : 0;
  return Family({a1, a2}, std::move(p));
}

Verdict swap_experiment(const Translation& translate, const StructureDescriptor& a1, const StructureDescriptor& a2,
                        const Sigma2Sentence& psi, const Sigma2Sentence& theta, std::uint64_t horizon,
                        const std::vector<std::uint64_t>& seeds, BfConfig cfg) {
  if (seeds.empty()) throw std::invalid_argument("swap_experiment needs at least one seed");
  if (equiv2_described(a1, a2, cfg)) throw PreconditionError("A1 and A2 are ≡2; the swap argument needs A1 ≢2 A2");
  Family fam = Family::parity(a1, a2);
  Learner counter = counter_learner(psi, theta);
  Verdict v;
  for (auto seed : seeds) {
    PresentationStream p(a1, seed);
    auto first = run_session(fam, p, translate(fam, counter), horizon);
    const std::string tag = "seed " + std::to_string(seed) + ": ";
    if (!first.stabilized_at) {
      v.diagnostics.push_back(tag + "no stabilization at horizon");
      continue;
    }
    const std::uint64_t n = first.final;
    Family swapped = swapped_parity_family(a1, a2, n);
    auto rerun = run_session(swapped, p, translate(swapped, counter), horizon);
    if (!rerun.stabilized_at) {
      v.diagnostics.push_back(tag + "rerun on the swapped family did not stabilize at horizon");
      continue;
    }
    if (iso_described(swapped.member(rerun.final), a1)) {
      v.diagnostics.push_back(tag + "rerun stabilized on a correct index at horizon");
      continue;
    }
    v.diagnostics.push_back(tag + "rerun stabilized on index " + std::to_string(rerun.final) +
                            ", not isomorphic to A1 (refuted at horizon)");
    if (!v.evidence) {
      SwapEvidence e{swapped, n, seed, *rerun.stabilized_at, {}};
      e.failing_segment.assign(rerun.trace.begin() + static_cast<std::ptrdiff_t>(*rerun.stabilized_at),
                               rerun.trace.end());
      v.evidence = std::move(e);
      v.outcome = Verdict::Outcome::RefutedAtHorizon;
    }
  }
  return v;
}

// --- learnability conditions ---------------------------------------------------------

namespace {

constexpr std::uint64_t kInfCount = std::numeric_limits<std::uint64_t>::max();

std::uint64_t unary_count(const UnaryTail& u, UnaryType t) {
  if (t == u.tail) return kInfCount;
  auto it = u.exceptional.find(t);
  return it == u.exceptional.end() ? 0 : it->second;
}

bool realizes(const UnaryTail& u, const std::vector<UnaryType>& ms) {
  std::map<UnaryType, std::uint64_t> need;
  for (auto t : ms) need[t]++;
  for (auto [t, k] : need)
    if (unary_count(u, t) < k) return false;
  return true;
}

// Sorted 1-type multisets of size <= bound realizable in u.
std::vector<std::vector<UnaryType>> unary_abstractions(const UnaryTail& u, unsigned bound) {
  std::vector<UnaryType> types{u.tail};
  for (auto [t, c] : u.exceptional)
    if (t != u.tail) types.push_back(t);
  std::sort(types.begin(), types.end());
  std::vector<std::vector<UnaryType>> out;
  std::vector<UnaryType> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (realizes(u, cur)) out.push_back(cur);
    if (cur.size() == bound) return;
    for (std::size_t i = from; i < types.size(); ++i) {
      cur.push_back(types[i]);
      rec(i);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

std::vector<CardProfile> order_abstractions(const OrderExpr& e, unsigned bound, unsigned cap) {
  std::vector<CardProfile> out;
  for (unsigned k = 0; k <= bound; ++k) {
    auto s = minimal_profiles(e, k, cap);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

// Whether (A_i, ā) ≤1 (A_j, b̄) for some b̄ of the same shape.
bool dominated_somewhere(const StructureDescriptor& ai, const TupleAbstraction& a, const StructureDescriptor& aj,
                         unsigned cap) {
  if (ai.is_unary()) {
    const auto& ms = std::get<std::vector<UnaryType>>(a);
    if (!realizes(aj.as_unary(), ms)) return false;
    return leq_n_unary_pointed(ai, ms, aj, ms, 1, cap);
  }
  const auto& r = std::get<CardProfile>(a);
  const unsigned k = static_cast<unsigned>(r.cards.size() - 1);
  for (const auto& q : minimal_profiles(aj.as_order().expr, k, cap))
    if (leq1_intervals(r, q)) return true;
  return false;
}

std::vector<std::optional<TupleAbstraction>> witnesses(const Family& fam, unsigned tuple_bound, unsigned cap,
                                                       bool strict) {
  if (tuple_bound < 1) throw std::invalid_argument("tuple_bound must be >= 1");
  if (cap < 1) throw std::invalid_argument("cap must be >= 1");
  const auto& base = fam.base();
  const std::size_t b = base.size();
  std::vector<std::vector<bool>> iso(b, std::vector<bool>(b, false));
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t j = 0; j < b; ++j) iso[i][j] = i == j || iso_described(base[i], base[j]);
  if (strict)
    for (std::size_t i = 0; i < b; ++i)
      for (std::size_t j = i + 1; j < b; ++j)
        if (iso[i][j]) throw std::invalid_argument("duplicates");
  std::vector<std::optional<TupleAbstraction>> out(b);
  for (std::size_t i = 0; i < b; ++i) {
    std::vector<TupleAbstraction> cands;
    if (base[i].is_unary()) {
      for (auto& m : unary_abstractions(base[i].as_unary(), tuple_bound)) cands.emplace_back(std::move(m));
    } else {
      for (auto& p : order_abstractions(base[i].as_order().expr, tuple_bound, cap)) cands.emplace_back(std::move(p));
    }
    for (const auto& a : cands) {
      bool ok = true;
      for (std::size_t j = 0; j < b && ok; ++j) {
        if (strict ? j == i : iso[i][j]) continue;
        if (dominated_somewhere(base[i], a, base[j], cap)) ok = false;
      }
      if (ok) {
        out[i] = a;
        break;
      }
    }
  }
  return out;
}

}  // namespace

std::vector<std::optional<TupleAbstraction>> condition3_witnesses(const Family& fam, unsigned tuple_bound,
                                                                  unsigned cap) {
  return witnesses(fam, tuple_bound, cap, false);
}

std::vector<std::optional<TupleAbstraction>> condition3a_witnesses(const Family& fam, unsigned tuple_bound,
                                                                   unsigned cap) {
  return witnesses(fam, tuple_bound, cap, true);
}

bool condition3_check(const Family& fam, unsigned tuple_bound, unsigned cap) {
  auto w = condition3_witnesses(fam, tuple_bound, cap);
  return std::all_of(w.begin(), w.end(), [](const auto& x) { return x.has_value(); });
}

bool condition3a_check(const Family& fam, unsigned tuple_bound, unsigned cap) {
  auto w = condition3a_witnesses(fam, tuple_bound, cap);
  return std::all_of(w.begin(), w.end(), [](const auto& x) { return x.has_value(); });
}

// --- witness sentences ----------------------------------------------------------------

namespace {

std::vector<std::uint64_t> realized_types(const Snapshot& model, const Tuple& x, std::uint32_t m) {
  std::set<std::uint64_t> types;
  Tuple xy = x;
  xy.resize(x.size() + m, 0);
  if (m > 0 && model.size() == 0) return {};
  for (;;) {
    types.insert(atomic_type_code(model, xy));
    std::size_t i = xy.size();
    while (i > x.size() && ++xy[i - 1] == model.size()) xy[--i] = 0;
    if (i == x.size()) break;
  }
  return {types.begin(), types.end()};
}

}  // namespace

Sigma2Sentence witness_sentence(const StructureDescriptor& d, const TupleAbstraction& a, unsigned cap) {
  if (cap < 1) throw std::invalid_argument("cap must be >= 1");
  Sigma2Sentence phi;
  if (d.is_unary()) {
    const auto& u = d.as_unary();
    const auto& ms = std::get<std::vector<UnaryType>>(a);
    if (!realizes(u, ms)) throw std::invalid_argument("witness not realized by the structure");
    const std::size_t ntypes = std::size_t{1} << u.vocab.size();
    std::vector<std::uint64_t> outside(ntypes);
    std::uint64_t largest = 0;
    for (std::size_t t = 0; t < ntypes; ++t) {
      std::uint64_t c = unary_count(u, static_cast<UnaryType>(t));
      std::uint64_t used = static_cast<std::uint64_t>(std::count(ms.begin(), ms.end(), static_cast<UnaryType>(t)));
      outside[t] = c == kInfCount ? kInfCount : c - used;
      if (outside[t] != kInfCount) largest = std::max(largest, outside[t]);
    }
    const auto m = static_cast<std::uint32_t>(std::min<std::uint64_t>(largest + 1, cap));
    std::vector<UnaryType> model_types(ms.begin(), ms.end());
    for (std::size_t t = 0; t < ntypes; ++t)
      for (std::uint64_t k = 0; k < std::min<std::uint64_t>(outside[t], m); ++k)
        model_types.push_back(static_cast<UnaryType>(t));
    std::vector<std::vector<Tuple>> rels(u.vocab.size());
    for (std::uint32_t z = 0; z < model_types.size(); ++z)
      for (std::size_t r = 0; r < rels.size(); ++r)
        if (model_types[z] >> r & 1u) rels[r].push_back({z});
    Snapshot model(u.vocab, static_cast<std::uint32_t>(model_types.size()), std::move(rels));
    Tuple x(ms.size());
    for (std::uint32_t i = 0; i < x.size(); ++i) x[i] = i;
    phi.x_arity = static_cast<std::uint32_t>(x.size());
    phi.y_arity = m;
    phi.types = realized_types(model, x, m);
    return phi;
  }
  const auto& r = std::get<CardProfile>(a);
  std::uint64_t largest = 0;
  for (const auto& c : r.cards)
    if (c.is_finite() && c.value() < cap) largest = std::max(largest, c.value());
  const auto m = static_cast<std::uint32_t>(std::min<std::uint64_t>(largest + 1, cap));
  std::uint32_t size = 0;
  Tuple x;
  for (std::size_t i = 0; i < r.cards.size(); ++i) {
    const auto& c = r.cards[i];
    size += static_cast<std::uint32_t>(c.is_infinite() ? m : std::min<std::uint64_t>(c.value(), m));
    if (i + 1 < r.cards.size()) x.push_back(size++);
  }
  Snapshot model = chain_snapshot(size);
  phi.x_arity = static_cast<std::uint32_t>(x.size());
  phi.y_arity = m;
  phi.types = realized_types(model, x, m);
  return phi;
}

Learner family_qss_learner(const Family& fam, unsigned tuple_bound, unsigned cap) {
  auto w = condition3_witnesses(fam, tuple_bound, cap);
  std::vector<Sigma2Sentence> per_base;
  for (std::size_t b = 0; b < fam.base().size(); ++b) {
    const auto& d = fam.base()[b];
    TupleAbstraction a;
    if (w[b]) {
      a = *w[b];
    } else if (d.is_unary()) {
      const auto& u = d.as_unary();
      std::vector<UnaryType> ms;
      for (auto [t, c] : u.exceptional)
        if (t != u.tail) ms.insert(ms.end(), c, t);
      a = ms;
    } else {
      a = *minimal_profiles(d.as_order().expr, 1, cap).begin();
    }
    per_base.push_back(witness_sentence(d, a, cap));
  }
  std::vector<Sigma2Sentence> sentences;
  const std::uint64_t k = fam.pattern().initial.size() + 2;
  for (std::uint64_t i = 0; i < k; ++i) sentences.push_back(per_base[fam.base_index(i)]);
  return qss_learner(std::move(sentences));
}

}  // namespace ulearn
