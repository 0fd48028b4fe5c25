#include "ulearn/trees.hpp"

#include <algorithm>
#include <stdexcept>

namespace ulearn {

FinTree::FinTree() : nodes_{Seq{}} {}

FinTree::FinTree(std::set<Seq> nodes) : nodes_(std::move(nodes)) {
  if (!nodes_.count(Seq{})) throw std::invalid_argument("tree must contain the empty sequence");
  for (const auto& s : nodes_)
    if (!s.empty() && !nodes_.count(Seq(s.begin(), s.end() - 1)))
      throw std::invalid_argument("tree is not prefix-closed");
}

FinTree FinTree::closure(const std::set<Seq>& seqs) {
  std::set<Seq> out{Seq{}};
  for (const auto& s : seqs)
    for (std::size_t len = 1; len <= s.size(); ++len) out.emplace(s.begin(), s.begin() + len);
  return FinTree(std::move(out));
}

FinTree FinTree::chain(std::size_t depth) {
  std::set<Seq> out;
  for (std::size_t len = 0; len <= depth; ++len) out.insert(Seq(len, 0));
  return FinTree(std::move(out));
}

std::size_t FinTree::height() const {
  std::size_t h = 0;
  for (const auto& s : nodes_) h = std::max(h, s.size());
  return h;
}

FinTree TreeGen::truncate(std::size_t depth) const {
  if (depth > depth_bound) throw std::invalid_argument("truncation depth exceeds the exploration bound");
  std::set<Seq> out{Seq{}};
  Seq cur;
  std::function<void()> rec = [&] {
    if (cur.size() == depth) return;
    for (std::uint32_t c = 0; c < branching; ++c) {
      cur.push_back(c);
      if (member(cur)) {
        out.insert(cur);
        rec();
      }
      cur.pop_back();
    }
  };
  rec();
  return FinTree(std::move(out));
}

FinTree interleave_trees(const FinTree& t, const FinTree& s) {
  std::set<Seq> raw;
  for (const auto& a : t.nodes())
    for (const auto& b : s.nodes()) {
      if (a.size() != b.size()) continue;
      Seq m;
      for (std::size_t i = 0; i < a.size(); ++i) {
        m.push_back(a[i]);
        m.push_back(b[i]);
      }
      raw.insert(std::move(m));
    }
  return FinTree::closure(raw);
}

KbOrder kb_compare(const Seq& a, const Seq& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] < b[i]) return KbOrder::Less;
    if (a[i] > b[i]) return KbOrder::Greater;
  }
  if (a.size() == b.size()) return KbOrder::Equal;
  return a.size() > b.size() ? KbOrder::Less : KbOrder::Greater;
}

Snapshot kb_linearize(const FinTree& t, std::size_t max_nodes) {
  if (t.size() > max_nodes) throw std::invalid_argument("kb_linearize: tree exceeds the node bound");
  std::vector<Seq> nodes(t.nodes().begin(), t.nodes().end());
  std::vector<Tuple> lt;
  for (std::uint32_t i = 0; i < nodes.size(); ++i)
    for (std::uint32_t j = 0; j < nodes.size(); ++j)
      if (kb_compare(nodes[i], nodes[j]) == KbOrder::Less) lt.push_back({i, j});
  return Snapshot(order_vocabulary(), static_cast<std::uint32_t>(nodes.size()), {std::move(lt)});
}

namespace {

// below[x] lists the elements smaller than x.
FinTree descents(const std::vector<std::vector<std::uint32_t>>& below) {
  std::set<Seq> out{Seq{}};
  Seq cur;
  std::function<void(std::uint32_t)> rec = [&](std::uint32_t top) {
    for (auto y : below[top]) {
      cur.push_back(y);
      out.insert(cur);
      rec(y);
      cur.pop_back();
    }
  };
  for (std::uint32_t x = 0; x < below.size(); ++x) {
    cur = {x};
    out.insert(cur);
    rec(x);
  }
  return FinTree(std::move(out));
}

}  // namespace

FinTree descending_tree(const OrderExpr& e) {
  Card c = cardinality(e);
  if (c.is_infinite()) throw std::invalid_argument("descending_tree: infinite order");
  if (c.value() > 24) throw std::invalid_argument("descending_tree: order too large");
  std::vector<std::vector<std::uint32_t>> below(c.value());
  for (std::uint32_t x = 0; x < below.size(); ++x)
    for (std::uint32_t y = 0; y < x; ++y) below[x].push_back(y);
  return descents(below);
}

FinTree descending_tree(const Snapshot& order) {
  if (!(order.vocab() == order_vocabulary())) throw std::invalid_argument("descending_tree: not an order snapshot");
  if (order.size() > 24) throw std::invalid_argument("descending_tree: order too large");
  std::vector<std::vector<std::uint32_t>> below(order.size());
  for (const auto& t : order.relation(0)) below[t[1]].push_back(t[0]);
  return descents(below);
}

bool has_path(const FinTree& t, std::size_t d) { return t.height() >= d; }

bool has_path(const TreeGen& t, std::size_t d) {
  if (d > t.depth_bound) throw std::invalid_argument("has_path: depth exceeds the exploration bound");
  Seq cur;
  std::function<bool()> rec = [&]() -> bool {
    if (cur.size() == d) return true;
    for (std::uint32_t c = 0; c < t.branching; ++c) {
      cur.push_back(c);
      bool found = t.member(cur) && rec();
      cur.pop_back();
      if (found) return true;
    }
    return false;
  };
  return rec();
}

Family reduction_family(const FinTree& t_x, const TreeGen& t_h, std::size_t trunc_depth, std::size_t max_nodes) {
  FinTree h = t_h.truncate(trunc_depth);
  FinTree xh = interleave_trees(t_x, h);
  auto kb_omega = [&](const FinTree& t) {
    // A finite linear order is determined by its size.
    Snapshot kb = kb_linearize(t, max_nodes);
    return StructureDescriptor::order(OrderExpr::prod(OrderExpr::finite(kb.size()), OrderExpr::omega()));
  };
  return Family::parity(kb_omega(xh), kb_omega(h));
}

}  // namespace ulearn
