#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "ulearn/card.hpp"
#include "ulearn/core.hpp"

namespace ulearn {

struct PointedSnapshot {
  Snapshot snapshot;
  Tuple tuple;
};

// ≤0 modes.  AllAtomic compares every atomic formula over the tuple's
// variables.  Enumerated(k) compares only the first k formulas of the
// enumeration below; formulas naming a variable outside the tuple are
// skipped.
//
// Enumeration of atomic formulas: level v holds the formulas whose largest
// variable index is v.  Within a level: equalities x_i = x_v (i = 0..v),
// then for each relation in vocabulary order the argument tuples over
// x_0..x_v that mention x_v, in lexicographic order.
struct Leq0Mode {
  enum class Kind { AllAtomic, Enumerated } kind = Kind::AllAtomic;
  std::size_t k = 0;
  static Leq0Mode all_atomic() { return {}; }
  static Leq0Mode enumerated(std::size_t k) { return {Kind::Enumerated, k}; }
};

bool leq0(const PointedSnapshot& a, const PointedSnapshot& b, Leq0Mode mode = {});

// (A, ā) ≤n (B, b̄) on snapshots by the literal recursion
//   ∀β<n ∀d̄ ∃c̄ (B, b̄d̄) ≤β (A, āc̄)
// with ≤0 in AllAtomic mode.  d̄ ranges over tuples of fresh distinct
// elements (length up to the domain size); tuples repeating an element only
// add equality information and are covered by their shorter distinct form.
// var_budget, when set, bounds the total number of elements picked over all
// rounds (the bounded-variable game matching Π_n sentences with that many
// variables).
bool leq_n_snapshots(const PointedSnapshot& a, const PointedSnapshot& b, unsigned n,
                     std::optional<std::size_t> var_budget = std::nullopt);

// Same recursion with d̄ ranging over all tuples (repetitions allowed) of
// length at most max_len per round.  Exponentially slower; a test oracle for
// the fresh-distinct reduction.
bool leq_n_snapshots_exhaustive(const PointedSnapshot& a, const PointedSnapshot& b, unsigned n,
                                std::size_t max_len);

// Unary descriptors: the game on type counts.  Moves are multisets of at
// most `cap` elements; finite counts above n*cap behave like ∞ in such a
// game and are replaced by it.  The pointed versions pre-place tuples given
// as 1-type sequences.
bool leq_n_unary(const StructureDescriptor& a, const StructureDescriptor& b, unsigned n, unsigned cap);
bool leq_n_unary_pointed(const StructureDescriptor& a, const std::vector<UnaryType>& a_tuple,
                         const StructureDescriptor& b, const std::vector<UnaryType>& b_tuple,
                         unsigned n, unsigned cap);

// Interval cardinality profile of a strictly increasing tuple of marked
// points: sizes of the points+1 open intervals.  Finite entries are capped.
struct CardProfile {
  std::vector<Card> cards;
  auto operator<=>(const CardProfile&) const = default;
};

using ProfileSet = std::set<CardProfile>;

bool leq1_intervals(const CardProfile& a, const CardProfile& b);

// All achievable profiles with `points` marked points.
ProfileSet interval_profiles(const OrderExpr& e, unsigned points, unsigned cap);
// The componentwise-minimal elements of interval_profiles(e, points, cap),
// computed compositionally.
ProfileSet minimal_profiles(const OrderExpr& e, unsigned points, unsigned cap);
ProfileSet minimal_elements(const ProfileSet& s);

// a ≤2 b: for every profile q of b with p <= cap points there is a profile r
// of a with p points and q >= r componentwise.
bool leq2_order(const OrderExpr& a, const OrderExpr& b, unsigned cap);

struct BfConfig {
  unsigned cap = 4;
};

// ≡2 on described structures: both directions of the unary game (n = 2) or
// of leq2_order.
bool equiv2_described(const StructureDescriptor& a, const StructureDescriptor& b, BfConfig cfg = {});

// ≤n on described structures; n >= 3 is rejected (Unsupported).
bool leq_n_described(const StructureDescriptor& a, const StructureDescriptor& b, unsigned n, BfConfig cfg = {});

// --- Π_n theory oracle -------------------------------------------------------
//
// Independent check of Karp's theorem on small snapshots.  A prenex Π_n
// sentence with at most var_bound variables has a quantifier-free matrix
// that is a boolean combination of atomic formulas, i.e. a set of atomic
// types.  Π1 sentences ∀x̄ θ hold in A iff θ contains every type A
// realizes; Π2 sentences ∀x̄∃ȳ θ hold iff θ meets S_A(ā), the set of types
// of āȳ, for every ā.  Quantifying over all θ, inclusion of theories
// reduces to comparing these realized type families.
struct TheoryProfile {
  unsigned n = 0;
  unsigned var_bound = 0;
  // families[p] for the ∀-block length p: one sorted type set per ∀-tuple,
  // deduplicated.  For n = 1 only families[p][0] (the realized p-types) is
  // used.
  std::vector<std::vector<std::vector<std::uint64_t>>> families;
};

TheoryProfile theory_profile(const Snapshot& s, unsigned n, unsigned var_bound);
// Π_n-th(a) ⊆ Π_n-th(b).
bool pi_included(const TheoryProfile& a, const TheoryProfile& b);
bool pi_n_oracle(const Snapshot& a, const Snapshot& b, unsigned n, unsigned var_bound);

}  // namespace ulearn
