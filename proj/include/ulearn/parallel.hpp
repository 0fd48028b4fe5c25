#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <tuple>
#include <vector>

#include "ulearn/core.hpp"
#include "ulearn/learn.hpp"
#include "ulearn/sessions.hpp"

namespace ulearn {

// One representative per isomorphism class of structures with a single
// binary relation "R", sizes 1..max_size (max_size <= 4).
std::vector<Snapshot> binary_relation_classes(std::uint32_t max_size);

// Per-structure tables for the bounded-variable game of leq_n_snapshots
// (n <= 2).  For a tuple x̄ of distinct elements, ext[l] is the set of
// relation patterns of x̄ē over fresh distinct ē of length l; the ∀/∃
// rounds of the game then become lookups and inclusions of these sets.
class KarpTables {
 public:
  KarpTables(const std::vector<Snapshot>& reps, unsigned var_bound);

  std::size_t size() const { return game_.size(); }
  // (reps[a]) ≤n (reps[b]) by the game, and by the Π_n oracle.
  bool game_leq(std::size_t a, std::size_t b, unsigned n) const;
  bool oracle_leq(std::size_t a, std::size_t b, unsigned n) const;

  struct Sig {
    std::uint32_t pattern = 0;
    std::vector<std::vector<std::uint32_t>> ext;  // ext[l], l = 0..budget-j
    bool operator==(const Sig&) const = default;
    auto operator<=>(const Sig&) const = default;
  };

 private:
  unsigned budget_;
  // game_[x][j]: distinct signatures of distinct j-tuples of structure x.
  std::vector<std::vector<std::vector<Sig>>> game_;
  std::vector<std::array<TheoryProfile, 2>> oracle_;  // n = 1, 2
};

struct KarpSweepReport {
  std::size_t classes = 0;
  std::size_t checks = 0;  // (pair, n) evaluations
  std::size_t discrepancies = 0;
  std::array<std::size_t, 3> true_counts{};  // per n
  std::vector<std::tuple<std::size_t, std::size_t, unsigned>> examples;  // first few discrepancies
};

KarpSweepReport karp_sweep_serial(const KarpTables& t, const std::vector<unsigned>& ns);
KarpSweepReport karp_sweep_parallel(const KarpTables& t, const std::vector<unsigned>& ns);

// One session per seed on a presentation of `target`.
std::vector<SessionResult> session_sweep_serial(const Family& fam, const StructureDescriptor& target,
                                                const Learner& l, std::uint64_t horizon,
                                                const std::vector<std::uint64_t>& seeds);
std::vector<SessionResult> session_sweep_parallel(const Family& fam, const StructureDescriptor& target,
                                                  const Learner& l, std::uint64_t horizon,
                                                  const std::vector<std::uint64_t>& seeds);

}  // namespace ulearn
