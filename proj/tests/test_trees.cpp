#include <algorithm>
#include <map>

#include "doctest.h"
#include "gen.hpp"
#include "ulearn/trees.hpp"

using namespace ulearn;

namespace {

FinTree tree(std::set<Seq> s) { return FinTree(std::move(s)); }

bool lt(const Snapshot& s, std::uint32_t a, std::uint32_t b) { return s.holds(0, {a, b}); }

// Post-order traversal with children visited in increasing order.
void post_order(const FinTree& t, Seq& cur, std::vector<Seq>& out) {
  std::vector<std::uint32_t> kids;
  for (const auto& n : t.nodes())
    if (n.size() == cur.size() + 1 && std::equal(cur.begin(), cur.end(), n.begin())) kids.push_back(n.back());
  for (auto c : kids) {
    cur.push_back(c);
    post_order(t, cur, out);
    cur.pop_back();
  }
  out.push_back(cur);
}

}  // namespace

TEST_CASE("FinTree validation") {
  CHECK_THROWS_AS(tree({{0}}), std::invalid_argument);
  CHECK_THROWS_AS(tree({{}, {0, 1}}), std::invalid_argument);
  CHECK(FinTree::closure({{1, 2}}) == tree({{}, {1}, {1, 2}}));
  CHECK(FinTree::chain(3).size() == 4);
  CHECK(FinTree::chain(3).height() == 3);
}

TEST_CASE("interleave examples") {
  CHECK(interleave_trees(FinTree(), FinTree::chain(4)) == FinTree());
  CHECK(interleave_trees(FinTree::chain(1), FinTree::chain(1)) == tree({{}, {0}, {0, 0}}));
  auto i = interleave_trees(FinTree::chain(2), FinTree::chain(3));
  CHECK(i.height() == 4);
  CHECK(i == FinTree::chain(4));
  auto mixed = interleave_trees(tree({{}, {1}}), tree({{}, {2}}));
  CHECK(mixed == tree({{}, {1}, {1, 2}}));
}

TEST_CASE("kb_compare examples") {
  CHECK(kb_compare({0}, {0}) == KbOrder::Equal);
  CHECK(kb_compare({0, 1}, {0}) == KbOrder::Less);
  CHECK(kb_compare({0}, {0, 1}) == KbOrder::Greater);
  CHECK(kb_compare({0}, {1}) == KbOrder::Less);
  CHECK(kb_compare({1}, {0, 5}) == KbOrder::Greater);
  CHECK(kb_compare({}, {3}) == KbOrder::Greater);
}

TEST_CASE("kb_linearize examples") {
  CHECK(kb_linearize(FinTree()).size() == 1);
  // Sorted nodes: ∅, (0), (1).
  auto s = kb_linearize(tree({{}, {0}, {1}}));
  CHECK(lt(s, 1, 2));
  CHECK(lt(s, 2, 0));
  CHECK(lt(s, 1, 0));
  // Sorted nodes: ∅, (0), (0,0).
  auto c = kb_linearize(FinTree::chain(2));
  CHECK(lt(c, 2, 1));
  CHECK(lt(c, 1, 0));
  CHECK_THROWS(kb_linearize(FinTree::chain(10), 5));
}

TEST_CASE("property: kb linearization is the post-order total order") {
  gen::Rng rng(1000);
  for (int i = 0; i < 300; ++i) {
    auto t = gen::tree(rng, 40);
    auto s = kb_linearize(t);
    REQUIRE(s.size() == t.size());
    std::vector<Seq> sorted(t.nodes().begin(), t.nodes().end());
    std::vector<Seq> post;
    Seq cur;
    post_order(t, cur, post);
    std::map<Seq, std::size_t> rank;
    for (std::size_t k = 0; k < post.size(); ++k) rank[post[k]] = k;
    for (std::uint32_t a = 0; a < s.size(); ++a)
      for (std::uint32_t b = 0; b < s.size(); ++b) CHECK(lt(s, a, b) == (rank[sorted[a]] < rank[sorted[b]]));
  }
}

TEST_CASE("descending_tree examples") {
  CHECK(descending_tree(OrderExpr::finite(1)) == tree({{}, {0}}));
  CHECK(descending_tree(chain_snapshot(2)) == tree({{}, {0}, {1}, {1, 0}}));
  CHECK(descending_tree(chain_snapshot(3)) == tree({{}, {0}, {1}, {2}, {1, 0}, {2, 0}, {2, 1}, {2, 1, 0}}));
  for (std::uint32_t n = 0; n <= 10; ++n) CHECK(descending_tree(OrderExpr::finite(n)).size() == (std::size_t{1} << n));
  CHECK_THROWS(descending_tree(parse_expr("w")));
}

TEST_CASE("has_path examples") {
  CHECK(has_path(FinTree::chain(5), 5));
  CHECK_FALSE(has_path(FinTree::chain(5), 6));
  TreeGen even{[](const Seq& s) { return s.back() % 2 == 0; }, 3, 6};
  CHECK(has_path(even, 6));
  CHECK(even.truncate(2).size() == 1 + 2 + 4);
  TreeGen dead{[](const Seq& s) { return s.size() <= 2; }, 2, 6};
  CHECK(has_path(dead, 2));
  CHECK_FALSE(has_path(dead, 3));
}

TEST_CASE("property: interleaving and paths") {
  gen::Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    auto t = gen::tree(rng, 20, 2), s = gen::tree(rng, 20, 2);
    auto ts = interleave_trees(t, s);
    for (std::size_t d = 0; d <= 8; ++d) {
      CHECK(has_path(ts, 2 * d) == (has_path(t, d) && has_path(s, d)));
      CHECK(has_path(ts, 2 * d + 1) == (has_path(t, d + 1) && has_path(s, d + 1)));
    }
  }
}

TEST_CASE("reduction_family examples") {
  TreeGen single{[](const Seq&) { return false; }, 2, 4};
  auto f = reduction_family(FinTree(), single, 3);
  CHECK(expr_equal(f.member(0).as_order().expr, parse_expr("w")));
  CHECK(expr_equal(f.member(1).as_order().expr, parse_expr("w")));

  TreeGen chain{[](const Seq& s) { return s.back() == 0; }, 2, 4};
  auto g = reduction_family(FinTree::chain(2), chain, 2);
  CHECK(expr_equal(g.member(0).as_order().expr, parse_expr("5*w")));
  CHECK(to_string(g.member(0).as_order().expr) == "5*w");
  CHECK(to_string(g.member(1).as_order().expr) == "3*w");
  for (std::uint64_t s = 0; s < 10; ++s) {
    PresentationStream p(g.member(1), 9);
    CHECK(restrict(p, s + 1).induced(static_cast<std::uint32_t>(s + 1)) == restrict(p, s));
  }
}
