#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ulearn/bfgame.hpp"
#include "ulearn/core.hpp"
#include "ulearn/learn.hpp"

namespace ulearn {

struct SessionResult {
  std::vector<std::uint64_t> trace;  // horizon + 1 entries
  std::optional<std::uint64_t> stabilized_at;
  std::uint64_t final = 0;
  std::uint64_t horizon = 0;
  std::string family_ref;
  std::string presentation_ref;
};

// Least t with trace constant on [t, horizon]; absent when the last entry
// differs from the one before.
std::optional<std::uint64_t> stabilization_point(const std::vector<std::uint64_t>& trace);

SessionResult run_session(const Family& fam, const PresentationStream& p, const Learner& l,
                          std::uint64_t horizon);

enum class SuccessMode { Ex, Bc };

struct SuccessReport {
  bool success = false;
  std::string diagnostic;  // empty when nothing to report
};

// Horizon approximations: Ex needs a stabilized trace whose final index names
// a member isomorphic to the truth; Bc needs every index in the last
// window+1 stages to do so.
SuccessReport evaluate_success_report(const SessionResult& r, const Family& fam, const StructureDescriptor& truth,
                                      SuccessMode mode, std::uint64_t window);
bool evaluate_success(const SessionResult& r, const Family& fam, const StructureDescriptor& truth, SuccessMode mode,
                      std::uint64_t window);

// --- swap adversary --------------------------------------------------------------

using Translation = std::function<Learner(const Family&, const Learner&)>;

Translation identity_translation();
// Outputs the stage-0 hypothesis of the given learner forever.
Translation freeze_translation();
Translation min_iso_translation();
Translation equiv2_translation(BfConfig cfg = {});

struct SwapEvidence {
  Family swapped;
  std::uint64_t n = 0;  // the index the first run stabilized on
  std::uint64_t seed = 0;
  std::uint64_t rerun_stabilized_at = 0;
  std::vector<std::uint64_t> failing_segment;  // rerun trace from stabilization to the horizon
};

struct Verdict {
  enum class Outcome { RefutedAtHorizon, NoRefutationFound } outcome = Outcome::NoRefutationFound;
  std::optional<SwapEvidence> evidence;
  std::vector<std::string> diagnostics;  // per seed
};

// The parity family (A1, A2, A1, ...) with entry n swapped: A2 at even n,
// A1 at odd n.
Family swapped_parity_family(const StructureDescriptor& a1, const StructureDescriptor& a2, std::uint64_t n);

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// psi, theta: Σ2 sentences for A1 and A2 feeding the counter learner.
Verdict swap_experiment(const Translation& translate, const StructureDescriptor& a1, const StructureDescriptor& a2,
                        const Sigma2Sentence& psi, const Sigma2Sentence& theta, std::uint64_t horizon,
                        const std::vector<std::uint64_t>& seeds, BfConfig cfg = {});

// --- learnability conditions ---------------------------------------------------------

// Tuple abstraction: 1-type multiset (unary) or interval profile (orders).
using TupleAbstraction = std::variant<std::vector<UnaryType>, CardProfile>;

// Witness ā per base index, or nullopt where none exists.
std::vector<std::optional<TupleAbstraction>> condition3_witnesses(const Family& fam, unsigned tuple_bound,
                                                                  unsigned cap);
std::vector<std::optional<TupleAbstraction>> condition3a_witnesses(const Family& fam, unsigned tuple_bound,
                                                                   unsigned cap);
bool condition3_check(const Family& fam, unsigned tuple_bound, unsigned cap);
// Throws std::invalid_argument("duplicates") on iso duplicates in the base.
bool condition3a_check(const Family& fam, unsigned tuple_bound, unsigned cap);

// ∃x̄ ∀ȳ "x̄ȳ realizes a type that (d, ā) realizes": the universal facts of
// (d, ā) with |ȳ| one more than the largest finite gap or count recorded by
// the witness (at most cap).
Sigma2Sentence witness_sentence(const StructureDescriptor& d, const TupleAbstraction& a, unsigned cap);

// qss learner over family indices 0..k for the base classes, from the
// condition-3 witnesses (members without a witness get their least
// 1-point abstraction).
Learner family_qss_learner(const Family& fam, unsigned tuple_bound, unsigned cap);

}  // namespace ulearn
