#include "ulearn/learn.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

namespace ulearn {

// --- learners ----------------------------------------------------------------

Learner::Learner(Factory make) : make_(std::move(make)) {
  if (!make_) throw std::invalid_argument("learner factory is empty");
}

Learner Learner::constant(std::uint64_t i) {
  return stateless([i](const Snapshot&) { return i; });
}

Learner Learner::stateless(Step f) {
  return Learner([f = std::move(f)] { return f; });
}

std::uint64_t Learner::operator()(const Snapshot& s) const {
  if (!inst_) inst_ = std::make_shared<Step>(make_());
  return (*inst_)(s);
}

StageSource::StageSource(std::function<Snapshot(std::uint64_t)> fetch, std::optional<std::uint64_t> limit)
    : fetch_(std::move(fetch)), limit_(limit) {}

StageSource StageSource::of_stream(const PresentationStream& p) {
  return StageSource([p](std::uint64_t s) { return restrict(p, s); });
}

StageSource StageSource::of_snapshot(const Snapshot& s) {
  if (s.size() == 0) throw std::invalid_argument("stage source needs a nonempty snapshot");
  return StageSource([s](std::uint64_t t) { return s.induced(static_cast<std::uint32_t>(t + 1)); },
                     s.size() - 1);
}

Snapshot StageSource::at(std::uint64_t stage) const {
  if (limit_ && stage > *limit_) throw OutOfUse("stage beyond the available prefix");
  max_ = std::max(max_.value_or(0), stage);
  return fetch_(stage);
}

std::uint64_t stream_use(const StreamLearner& l, const StageSource& src, std::uint64_t n) {
  src.reset_use();
  l.step(src, n);
  return src.max_queried().value_or(0);
}

StreamLearner adapt(const Learner& f) {
  Learner g = f.fresh();
  return {[g](const StageSource& src, std::uint64_t n) { return g(src.at(n)); }};
}

Learner adapt_back(const StreamLearner& l) {
  return Learner::stateless([l](const Snapshot& s) -> std::uint64_t {
    if (s.size() == 0) return 0;
    auto src = StageSource::of_snapshot(s);
    for (std::uint64_t k = s.size(); k-- > 0;) {
      try {
        return l.step(src, k);
      } catch (const StageSource::OutOfUse&) {
      }
    }
    return 0;
  });
}

namespace {

// Feeds a stepper the snapshots S↾0, S↾1, ... one stage at a time.  Calls
// on a one-element extension of the previous snapshot continue; anything
// else replays from stage 0.
struct Stepper {
  virtual ~Stepper() = default;
  virtual void reset() = 0;
  virtual std::uint64_t advance(const Snapshot& stage) = 0;
};

template <class S, class... Args>
Learner incremental(Args... args) {
  return Learner([args...]() -> Learner::Step {
    auto st = std::make_shared<S>(args...);
    auto last = std::make_shared<std::optional<Snapshot>>();
    auto last_out = std::make_shared<std::uint64_t>(0);
    return [st, last, last_out](const Snapshot& s) -> std::uint64_t {
      if (s.size() == 0) return 0;
      if (*last && **last == s) return *last_out;
      std::uint64_t out;
      if (*last && s.size() == (*last)->size() + 1 && s.extends(**last)) {
        out = st->advance(s);
      } else {
        st->reset();
        out = 0;
        for (std::uint32_t t = 1; t < s.size(); ++t) out = st->advance(s.induced(t));
        out = st->advance(s);
      }
      *last = s;
      *last_out = out;
      return out;
    };
  });
}

}  // namespace

// --- atomic types ----------------------------------------------------------------

namespace {

template <class F>
void for_lex_tuples(std::size_t len, std::uint32_t arity, F&& f) {
  if (len == 0 && arity > 0) return;
  std::vector<std::size_t> pos(arity, 0);
  for (;;) {
    f(pos);
    std::size_t i = arity;
    while (i > 0 && ++pos[i - 1] == len) pos[--i] = 0;
    if (i == 0) return;
  }
}

}  // namespace

std::uint64_t atomic_type_code(const Snapshot& s, const Tuple& t) {
  std::uint64_t code = 0;
  unsigned bit = 0;
  auto push = [&](bool v) {
    if (bit == 64) throw Unsupported("atomic type needs more than 64 bits");
    if (v) code |= std::uint64_t{1} << bit;
    ++bit;
  };
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) push(t[i] == t[j]);
  Tuple args;
  for (std::size_t r = 0; r < s.vocab().size(); ++r) {
    const auto arity = s.vocab()[r].arity;
    for_lex_tuples(t.size(), arity, [&](const std::vector<std::size_t>& pos) {
      args.assign(arity, 0);
      for (std::uint32_t k = 0; k < arity; ++k) args[k] = t[pos[k]];
      push(s.holds(r, args));
    });
  }
  return code;
}

// --- tuple codes -------------------------------------------------------------------

namespace {

std::uint64_t ipow(std::uint64_t b, std::uint32_t e) {
  std::uint64_t r = 1;
  for (std::uint32_t i = 0; i < e; ++i) {
    if (b != 0 && r > std::numeric_limits<std::uint64_t>::max() / b) throw Unsupported("tuple code overflow");
    r *= b;
  }
  return r;
}

}  // namespace

std::uint64_t tuples_below(std::uint64_t m, std::uint32_t arity) { return ipow(m, arity); }

std::uint64_t tuple_code(const Tuple& t) {
  const auto k = static_cast<std::uint32_t>(t.size());
  if (k == 0) return 0;
  const std::uint64_t m = *std::max_element(t.begin(), t.end());
  std::uint64_t code = ipow(m, k);
  bool seen = false;
  for (std::uint32_t i = 0; i < k; ++i) {
    const std::uint32_t rem = k - i - 1;
    for (std::uint64_t v = 0; v < t[i]; ++v) {
      bool s2 = seen || v == m;
      code += s2 ? ipow(m + 1, rem) : ipow(m + 1, rem) - ipow(m, rem);
    }
    seen = seen || t[i] == m;
  }
  return code;
}

Tuple tuple_decode(std::uint64_t code, std::uint32_t k) {
  if (k == 0) {
    if (code != 0) throw std::invalid_argument("only code 0 names the empty tuple");
    return {};
  }
  std::uint64_t m = 0;
  while (ipow(m + 1, k) <= code) ++m;
  std::uint64_t off = code - ipow(m, k);
  Tuple t;
  bool seen = false;
  for (std::uint32_t i = 0; i < k; ++i) {
    const std::uint32_t rem = k - i - 1;
    for (std::uint64_t v = 0; v <= m; ++v) {
      bool s2 = seen || v == m;
      std::uint64_t block = s2 ? ipow(m + 1, rem) : ipow(m + 1, rem) - ipow(m, rem);
      if (off < block) {
        t.push_back(static_cast<std::uint32_t>(v));
        seen = s2;
        break;
      }
      off -= block;
    }
  }
  return t;
}

// --- sentence evaluation -------------------------------------------------------------

namespace {

bool is_linear_order(const Snapshot& s, std::vector<std::uint32_t>& rank) {
  const std::uint32_t n = s.size();
  const auto& lt = s.relation(0);
  if (lt.size() != static_cast<std::size_t>(n) * (n - (n > 0 ? 1 : 0)) / 2) return false;
  rank.assign(n, 0);
  std::vector<std::uint8_t> dense(static_cast<std::size_t>(n) * n, 0);
  for (const auto& t : lt) {
    if (t[0] == t[1]) return false;
    dense[static_cast<std::size_t>(t[0]) * n + t[1]] = 1;
    ++rank[t[1]];
  }
  for (const auto& t : lt)
    if (dense[static_cast<std::size_t>(t[1]) * n + t[0]]) return false;
  std::vector<std::uint8_t> seen(n, 0);
  for (auto r : rank) {
    if (r >= n || seen[r]) return false;
    seen[r] = 1;
  }
  return true;
}

// Checks ∀ȳ over a small model: every type of (x, ȳ) lies in `types`.
bool model_types_within(const Snapshot& model, const Tuple& x, std::uint32_t y_arity,
                        const std::vector<std::uint64_t>& types) {
  Tuple xy = x;
  xy.resize(x.size() + y_arity, 0);
  if (y_arity > 0 && model.size() == 0) return true;
  for (;;) {
    if (!std::binary_search(types.begin(), types.end(), atomic_type_code(model, xy))) return false;
    std::size_t i = xy.size();
    while (i > x.size() && ++xy[i - 1] == model.size()) xy[--i] = 0;
    if (i == x.size()) return true;
  }
}

}  // namespace

SentenceEvaluator::SentenceEvaluator(const Snapshot& s, const Sigma2Sentence& phi) : s_(&s), phi_(&phi) {
  for (const auto& c : phi.clauses)
    for (const auto& lit : c) {
      for (auto v : lit.args)
        if (v >= phi.x_arity + phi.y_arity) throw std::invalid_argument("literal variable out of range");
      if (lit.rel == "=") {
        if (lit.args.size() != 2) throw std::invalid_argument("equality literal needs two arguments");
        rel_index_.push_back(0);
        continue;
      }
      auto r = s.vocab().index_of(lit.rel);
      if (s.vocab()[r].arity != lit.args.size()) throw std::invalid_argument("literal arity mismatch: " + lit.rel);
      rel_index_.push_back(r);
    }
  if (!phi.types) return;
  if (s.vocab().all_unary() && s.vocab().size() <= 8) {
    fast_ = Fast::Unary;
    unary_type_.assign(s.size(), 0);
    for (std::size_t r = 0; r < s.vocab().size(); ++r)
      for (const auto& t : s.relation(r)) unary_type_[t[0]] |= 1u << r;
    type_count_.assign(std::size_t{1} << s.vocab().size(), 0);
    for (auto t : unary_type_) type_count_[t]++;
  } else if (s.vocab() == order_vocabulary() && is_linear_order(s, rank_)) {
    fast_ = Fast::Order;
  }
}

bool SentenceEvaluator::matrix(const Tuple& x, const Tuple& y) const {
  Tuple xy = x;
  xy.insert(xy.end(), y.begin(), y.end());
  if (phi_->types) return std::binary_search(phi_->types->begin(), phi_->types->end(), atomic_type_code(*s_, xy));
  std::size_t li = 0;
  Tuple args;
  for (const auto& c : phi_->clauses) {
    bool sat = false;
    for (const auto& lit : c) {
      bool v;
      if (lit.rel == "=") {
        v = xy[lit.args[0]] == xy[lit.args[1]];
      } else {
        args.clear();
        for (auto a : lit.args) args.push_back(xy[a]);
        v = s_->holds(rel_index_[li], args);
      }
      ++li;
      if (v != lit.negated) sat = true;
    }
    if (!sat) return false;
  }
  return true;
}

bool SentenceEvaluator::holds(const Tuple& x) const {
  if (x.size() != phi_->x_arity) throw std::invalid_argument("witness arity mismatch");
  for (auto v : x)
    if (v >= s_->size()) throw std::invalid_argument("witness outside the domain");
  switch (fast_) {
    case Fast::Unary: return holds_unary(x);
    case Fast::Order: return holds_order(x);
    case Fast::None: break;
  }
  return holds_brute(x);
}

bool SentenceEvaluator::holds_brute(const Tuple& x) const {
  const auto m = phi_->y_arity;
  if (m > 0 && s_->size() == 0) return true;
  Tuple y(m, 0);
  for (;;) {
    if (!matrix(x, y)) return false;
    std::size_t i = m;
    while (i > 0 && ++y[i - 1] == s_->size()) y[--i] = 0;
    if (i == 0) return true;
  }
}

// The types of (x, ȳ) depend only on the 1-types and equalities within x and
// on how many elements of each 1-type lie outside x, up to |ȳ|.
bool SentenceEvaluator::holds_unary(const Tuple& x) const {
  const auto m = phi_->y_arity;
  const std::size_t ntypes = std::size_t{1} << s_->vocab().size();
  std::vector<std::uint32_t> distinct;
  for (auto v : x)
    if (std::find(distinct.begin(), distinct.end(), v) == distinct.end()) distinct.push_back(v);
  std::vector<std::uint64_t> key;
  for (auto v : x) {
    key.push_back(static_cast<std::uint64_t>(std::find(distinct.begin(), distinct.end(), v) - distinct.begin()));
    key.push_back(unary_type_[v]);
  }
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  std::vector<std::uint64_t> outside = type_count_;
  for (auto v : distinct) outside[unary_type_[v]]--;
  // Small model: the distinct entries of x, then min(count, m) per type.
  std::vector<UnaryType> model_types;
  for (auto v : distinct) model_types.push_back(unary_type_[v]);
  for (std::size_t t = 0; t < ntypes; ++t)
    for (std::uint64_t k = 0; k < std::min<std::uint64_t>(outside[t], m); ++k)
      model_types.push_back(static_cast<UnaryType>(t));
  std::vector<std::vector<Tuple>> rels(s_->vocab().size());
  for (std::uint32_t z = 0; z < model_types.size(); ++z)
    for (std::size_t r = 0; r < rels.size(); ++r)
      if (model_types[z] >> r & 1u) rels[r].push_back({z});
  Snapshot model(s_->vocab(), static_cast<std::uint32_t>(model_types.size()), std::move(rels));
  Tuple mx;
  for (auto v : x)
    mx.push_back(static_cast<std::uint32_t>(std::find(distinct.begin(), distinct.end(), v) - distinct.begin()));
  return memo_[key] = model_types_within(model, mx, m, *phi_->types);
}

// For linear orders the types of (x, ȳ) depend only on the order pattern of
// x and the gap sizes between its entries, up to |ȳ|.
bool SentenceEvaluator::holds_order(const Tuple& x) const {
  const auto m = phi_->y_arity;
  std::vector<std::uint32_t> ranks;
  for (auto v : x) ranks.push_back(rank_[v]);
  std::sort(ranks.begin(), ranks.end());
  ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
  std::vector<std::uint64_t> gaps;
  std::uint64_t prev_end = 0;
  for (auto r : ranks) {
    gaps.push_back(r - prev_end);
    prev_end = r + 1;
  }
  gaps.push_back(s_->size() - prev_end);
  std::vector<std::uint64_t> key;
  for (auto v : x) key.push_back(static_cast<std::uint64_t>(std::lower_bound(ranks.begin(), ranks.end(), rank_[v]) - ranks.begin()));
  key.push_back(ranks.size());
  for (auto g : gaps) key.push_back(std::min<std::uint64_t>(g, m));
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  // Small chain with min(gap, m) elements per gap.
  std::vector<std::uint32_t> pos;  // chain position of the i-th distinct rank
  std::uint32_t size = 0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    size += static_cast<std::uint32_t>(std::min<std::uint64_t>(gaps[i], m));
    if (i < ranks.size()) pos.push_back(size++);
  }
  Snapshot model = chain_snapshot(size);
  Tuple mx;
  for (auto v : x) {
    auto i = std::lower_bound(ranks.begin(), ranks.end(), rank_[v]) - ranks.begin();
    mx.push_back(pos[static_cast<std::size_t>(i)]);
  }
  return memo_[key] = model_types_within(model, mx, m, *phi_->types);
}

bool eval_sigma2_bounded(const Snapshot& s, const Sigma2Sentence& phi) {
  SentenceEvaluator ev(s, phi);
  if (phi.x_arity > 0 && s.size() == 0) return false;
  Tuple x(phi.x_arity, 0);
  for (;;) {
    if (ev.holds(x)) return true;
    std::size_t i = x.size();
    while (i > 0 && ++x[i - 1] == s.size()) x[--i] = 0;
    if (i == 0) return false;
  }
}

// --- qss learner -------------------------------------------------------------------

namespace {

constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();

// Least code >= `from` below `bound` whose tuple satisfies ∀ȳ θ, or kNone.
std::uint64_t first_unrefuted(const SentenceEvaluator& ev, const Sigma2Sentence& phi, std::uint64_t from,
                              std::uint64_t bound, std::uint64_t& cursor) {
  cursor = from;
  while (cursor < bound) {
    if (ev.holds(tuple_decode(cursor, phi.x_arity))) return cursor;
    ++cursor;
  }
  return kNone;
}

struct QssStepper : Stepper {
  explicit QssStepper(std::vector<Sigma2Sentence> sentences) : sentences(std::move(sentences)) { reset(); }

  void reset() override {
    cand.assign(sentences.size(), 0);
    witness.assign(sentences.size(), kNone);
  }

  // Updates witness[i] for the snapshot of stage n = size - 1.
  void update(const Snapshot& s) {
    const std::uint64_t n = s.size() - 1;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      const auto& phi = sentences[i];
      // Tuples over the current domain {0..n}.
      const std::uint64_t bound = tuples_below(n + 1, phi.x_arity);
      SentenceEvaluator ev(s, phi);
      std::uint64_t cursor;
      witness[i] = first_unrefuted(ev, phi, cand[i], bound, cursor);
      cand[i] = cursor;
    }
  }

  std::uint64_t advance(const Snapshot& s) override {
    update(s);
    const std::uint64_t n = s.size() - 1;
    std::uint64_t best = 0, best_w = kNone;
    for (std::size_t i = 0; i < sentences.size() && i <= n; ++i)
      if (witness[i] < best_w) {
        best_w = witness[i];
        best = i;
      }
    return best;
  }

  std::vector<Sigma2Sentence> sentences;
  std::vector<std::uint64_t> cand;
  std::vector<std::uint64_t> witness;
};

struct CounterStepper : Stepper {
  CounterStepper(Sigma2Sentence psi, Sigma2Sentence theta) : phi{std::move(psi), std::move(theta)} { reset(); }

  void reset() override {
    for (int k = 0; k < 2; ++k) {
      cand[k] = 0;
      history[k].clear();
    }
  }

  std::uint64_t advance(const Snapshot& s) override {
    const std::uint64_t stage = s.size() - 1;
    std::uint64_t counter[2];
    for (int k = 0; k < 2; ++k) {
      SentenceEvaluator ev(s, phi[k]);
      std::uint64_t cursor;
      // Tuples over the whole domain {0..stage}.
      std::uint64_t value = first_unrefuted(ev, phi[k], cand[k], tuples_below(s.size(), phi[k].x_arity), cursor);
      cand[k] = cursor;
      history[k].push_back(value);
      counter[k] = value == kNone ? 0 : static_cast<std::uint64_t>(std::count(history[k].begin(), history[k].end(), value));
    }
    return counter[0] > counter[1] ? 2 * stage + 2 : 2 * stage + 1;
  }

  Sigma2Sentence phi[2];
  std::uint64_t cand[2] = {0, 0};
  std::vector<std::uint64_t> history[2];
};

}  // namespace

Learner qss_learner(std::vector<Sigma2Sentence> sentences) {
  if (sentences.empty()) throw std::invalid_argument("qss_learner needs at least one sentence");
  return incremental<QssStepper>(std::move(sentences));
}

std::vector<std::vector<std::optional<std::uint64_t>>> qss_witness_trace(
    const std::vector<Sigma2Sentence>& sentences, const Snapshot& final_stage) {
  QssStepper st(sentences);
  std::vector<std::vector<std::optional<std::uint64_t>>> out;
  for (std::uint32_t t = 1; t <= final_stage.size(); ++t) {
    st.update(final_stage.induced(t));
    std::vector<std::optional<std::uint64_t>> row;
    for (auto w : st.witness) row.push_back(w == kNone ? std::nullopt : std::optional<std::uint64_t>(w));
    out.push_back(std::move(row));
  }
  return out;
}

Learner counter_learner(Sigma2Sentence psi, Sigma2Sentence theta) {
  return incremental<CounterStepper>(std::move(psi), std::move(theta));
}

// --- translations ---------------------------------------------------------------------

std::uint64_t least_related_index(const Family& fam, std::uint64_t i, const MemberRelation& same) {
  const std::uint64_t limit = fam.pattern().initial.size() + 2;
  const auto& target = fam.member(i);
  for (std::uint64_t j = 0; j < std::min(i, limit); ++j)
    if (same(fam.member(j), target)) return j;
  return i;
}

namespace {

// Output translation through a per-base-index table, filled lazily.
Learner translate_by(const Family& fam, const Learner& l, MemberRelation same) {
  return Learner([fam, l, same]() -> Learner::Step {
    auto inner = l.fresh();
    auto memo = std::make_shared<std::map<std::pair<std::size_t, std::size_t>, bool>>();
    return [fam, inner, same, memo](const Snapshot& s) {
      const std::uint64_t i = inner(s);
      const std::uint64_t limit = fam.pattern().initial.size() + 2;
      const std::size_t bi = fam.base_index(i);
      for (std::uint64_t j = 0; j < std::min(i, limit); ++j) {
        const std::size_t bj = fam.base_index(j);
        auto key = std::make_pair(bj, bi);
        auto it = memo->find(key);
        if (it == memo->end()) it = memo->emplace(key, same(fam.base()[bj], fam.base()[bi])).first;
        if (it->second) return j;
      }
      return i;
    };
  });
}

}  // namespace

Learner min_iso_translate(const Family& fam, const Learner& l) {
  return translate_by(fam, l, [](const StructureDescriptor& a, const StructureDescriptor& b) {
    return iso_described(a, b);
  });
}

Learner equiv2_translate(const Family& fam, const Learner& l, BfConfig cfg) {
  return translate_by(fam, l, [cfg](const StructureDescriptor& a, const StructureDescriptor& b) {
    return equiv2_described(a, b, cfg);
  });
}

UniformLearner uniform_equiv2_translate(UniformLearner l, BfConfig cfg) {
  return [l = std::move(l), cfg](const Family& fam, const Snapshot& s) {
    return least_related_index(fam, l(fam, s), [cfg](const StructureDescriptor& a, const StructureDescriptor& b) {
      return equiv2_described(a, b, cfg);
    });
  };
}

Family dedup_family(const Family& fam) {
  std::vector<StructureDescriptor> out;
  const std::uint64_t limit = fam.pattern().initial.size() + 2;
  for (std::uint64_t i = 0; i < limit; ++i) {
    const auto& d = fam.member(i);
    bool dup = std::any_of(out.begin(), out.end(), [&](const StructureDescriptor& e) { return iso_described(e, d); });
    if (!dup) out.push_back(d);
  }
  return Family::identity(std::move(out));
}

}  // namespace ulearn
