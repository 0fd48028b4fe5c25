#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

#include "ulearn/core.hpp"

namespace ulearn {

using Seq = std::vector<std::uint32_t>;

// Finite prefix-closed set of sequences containing the empty sequence.
class FinTree {
 public:
  FinTree();  // {∅}
  // Throws std::invalid_argument unless the node set is prefix-closed and
  // contains ∅.
  explicit FinTree(std::set<Seq> nodes);
  // Adds all prefixes of the given sequences (and ∅).
  static FinTree closure(const std::set<Seq>& seqs);
  // {∅, (0), (0,0), ...} with nodes of length up to depth.
  static FinTree chain(std::size_t depth);

  const std::set<Seq>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool contains(const Seq& s) const { return nodes_.count(s) != 0; }
  std::size_t height() const;  // length of the longest node

  bool operator==(const FinTree&) const = default;

 private:
  std::set<Seq> nodes_;
};

// Tree given by a membership predicate; children of a node are explored
// with entries below `branching`, nodes up to length `depth_bound`.
struct TreeGen {
  std::function<bool(const Seq&)> member;
  std::uint32_t branching = 2;
  std::size_t depth_bound = 8;

  // Explored nodes of length <= depth (depth <= depth_bound).
  FinTree truncate(std::size_t depth) const;
};

// {σ*τ : |σ| = |τ|, σ ∈ t, τ ∈ s} closed under prefixes, where
// σ*τ = (σ(0), τ(0), σ(1), τ(1), ...).
FinTree interleave_trees(const FinTree& t, const FinTree& s);

enum class KbOrder { Less, Equal, Greater };

// Kleene–Brouwer order: a proper extension is below its prefix; otherwise
// the smaller entry at the first difference is below.
KbOrder kb_compare(const Seq& a, const Seq& b);

constexpr std::size_t kMaxKbNodes = 4096;

// Linear order snapshot whose element i is the i-th node of t in sorted
// (lexicographic) order.
Snapshot kb_linearize(const FinTree& t, std::size_t max_nodes = kMaxKbNodes);

// Strictly descending sequences of elements of a finite linear order.  The
// expression must have finite cardinality; snapshots must be linear orders
// over the order vocabulary.
FinTree descending_tree(const OrderExpr& e);
FinTree descending_tree(const Snapshot& order);

// Some node of length d exists.
bool has_path(const FinTree& t, std::size_t d);
bool has_path(const TreeGen& t, std::size_t d);

// Parity family [KB(t_x * t_h↾depth)·ω, KB(t_h↾depth)·ω].
Family reduction_family(const FinTree& t_x, const TreeGen& t_h, std::size_t trunc_depth,
                        std::size_t max_nodes = kMaxKbNodes);

}  // namespace ulearn
