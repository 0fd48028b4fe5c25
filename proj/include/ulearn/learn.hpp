#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ulearn/bfgame.hpp"
#include "ulearn/core.hpp"

namespace ulearn {

// --- learners ----------------------------------------------------------------

// A total learner on finite snapshots.  Implementations may keep state that
// speeds up stepping through the coherent snapshots of one presentation;
// outputs never depend on that state.  Copies share the running instance,
// fresh() starts a new one (use one instance per thread).
class Learner {
 public:
  using Step = std::function<std::uint64_t(const Snapshot&)>;
  using Factory = std::function<Step()>;

  explicit Learner(Factory make);
  static Learner constant(std::uint64_t i);
  static Learner stateless(Step f);

  std::uint64_t operator()(const Snapshot& s) const;
  Learner fresh() const { return Learner(make_); }

 private:
  Factory make_;
  mutable std::shared_ptr<Step> inst_;
};

// Stage access for stream learners; records the largest stage read.
class StageSource {
 public:
  // Stages beyond `limit` throw OutOfUse.
  explicit StageSource(std::function<Snapshot(std::uint64_t)> fetch,
                       std::optional<std::uint64_t> limit = std::nullopt);
  static StageSource of_stream(const PresentationStream& p);
  // Stages 0..s.size()-1 of a single snapshot.
  static StageSource of_snapshot(const Snapshot& s);

  Snapshot at(std::uint64_t stage) const;
  std::optional<std::uint64_t> max_queried() const { return max_; }
  void reset_use() const { max_.reset(); }

  struct OutOfUse : std::runtime_error {
    using std::runtime_error::runtime_error;
  };

 private:
  std::function<Snapshot(std::uint64_t)> fetch_;
  std::optional<std::uint64_t> limit_;
  mutable std::optional<std::uint64_t> max_;
};

struct StreamLearner {
  std::function<std::uint64_t(const StageSource&, std::uint64_t)> step;
};

// Largest stage the learner reads when answering at stage n.
std::uint64_t stream_use(const StreamLearner& l, const StageSource& src, std::uint64_t n);

StreamLearner adapt(const Learner& f);
Learner adapt_back(const StreamLearner& l);

// --- Σ2 sentences --------------------------------------------------------------

// Variable v < x_arity names x_v, otherwise y_{v - x_arity}.
struct Literal {
  std::string rel;  // relation name, or "=" for equality
  std::vector<std::uint32_t> args;
  bool negated = false;
  bool operator==(const Literal&) const = default;
};

using Clause = std::vector<Literal>;  // disjunction

// Atomic type code of a tuple: bit per equality t_i = t_j (i < j, row-major),
// then per relation in vocabulary order, per argument tuple over the
// positions in lexicographic order.  At most 64 bits.
std::uint64_t atomic_type_code(const Snapshot& s, const Tuple& t);

// ∃x̄ ∀ȳ θ(x̄, ȳ).  θ is either a conjunction of clauses or "the atomic type
// of x̄ȳ is one of `types`" (a disjunction of complete diagrams).
struct Sigma2Sentence {
  std::uint32_t x_arity = 0;
  std::uint32_t y_arity = 0;
  std::vector<Clause> clauses;
  std::optional<std::vector<std::uint64_t>> types;  // sorted when set

  bool operator==(const Sigma2Sentence&) const = default;
};

// Evaluates x̄ ↦ ∀ȳ θ(x̄, ȳ) over one snapshot.  Type-set matrices over
// unary or linear-order snapshots are decided from counts and gap sizes
// instead of enumerating ȳ.
class SentenceEvaluator {
 public:
  SentenceEvaluator(const Snapshot& s, const Sigma2Sentence& phi);
  bool holds(const Tuple& x) const;  // ∀ȳ θ(x, ȳ)
  bool matrix(const Tuple& x, const Tuple& y) const;

 private:
  bool holds_brute(const Tuple& x) const;
  bool holds_unary(const Tuple& x) const;
  bool holds_order(const Tuple& x) const;

  const Snapshot* s_;
  const Sigma2Sentence* phi_;
  std::vector<std::size_t> rel_index_;
  enum class Fast { None, Unary, Order } fast_ = Fast::None;
  std::vector<std::uint32_t> unary_type_;  // per element
  std::vector<std::uint32_t> rank_;        // per element, for orders
  std::vector<std::uint64_t> type_count_;  // per 1-type, for unary
  // Fast-path answers keyed by the data they depend on.
  mutable std::map<std::vector<std::uint64_t>, bool> memo_;
};

bool eval_sigma2_bounded(const Snapshot& s, const Sigma2Sentence& phi);

// Enumeration of k-tuples of naturals by maximum entry, then
// lexicographically; code(t) >= max(t), so codes <= n name tuples over
// {0..n}.
std::uint64_t tuple_code(const Tuple& t);
Tuple tuple_decode(std::uint64_t code, std::uint32_t arity);
// Number of k-tuples with entries < m, i.e. the first code naming a tuple
// with an entry >= m.
std::uint64_t tuples_below(std::uint64_t m, std::uint32_t arity);

// Monotone-witness learner: per sentence the least x̄-code over the current
// domain not yet refuted; output the i <= n minimizing (w_i, i), 0 if no
// witness.
Learner qss_learner(std::vector<Sigma2Sentence> sentences);

// Per-stage witness codes of qss_learner (nullopt = none), for inspection.
std::vector<std::vector<std::optional<std::uint64_t>>> qss_witness_trace(
    const std::vector<Sigma2Sentence>& sentences, const Snapshot& final_stage);

// a_s / b_s counters; output 2s+2 if c_a(s) > c_b(s), else 2s+1.
Learner counter_learner(Sigma2Sentence psi, Sigma2Sentence theta);

// --- translations --------------------------------------------------------------

// Least family index whose member satisfies `same` with the member at i.
using MemberRelation = std::function<bool(const StructureDescriptor&, const StructureDescriptor&)>;
std::uint64_t least_related_index(const Family& fam, std::uint64_t i, const MemberRelation& same);

Learner min_iso_translate(const Family& fam, const Learner& l);
Learner equiv2_translate(const Family& fam, const Learner& l, BfConfig cfg = {});

using UniformLearner = std::function<std::uint64_t(const Family&, const Snapshot&)>;
UniformLearner uniform_equiv2_translate(UniformLearner l, BfConfig cfg = {});

Family dedup_family(const Family& fam);

}  // namespace ulearn
