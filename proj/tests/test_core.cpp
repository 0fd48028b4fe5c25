#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "gen.hpp"
#include "ulearn/core.hpp"

using namespace ulearn;

namespace {

StructureDescriptor all_p(std::map<UnaryType, std::uint64_t> exceptional = {}) {
  return StructureDescriptor::unary(UnaryTail{unary_vocabulary({"P"}), std::move(exceptional), 1});
}

Snapshot permuted(const Snapshot& s, const std::vector<std::uint32_t>& pi) {
  std::vector<std::vector<Tuple>> rels(s.vocab().size());
  for (std::size_t r = 0; r < rels.size(); ++r) {
    for (auto t : s.tuples(r)) {
      for (auto& x : t) x = pi[x];
      rels[r].push_back(t);
    }
    std::sort(rels[r].begin(), rels[r].end());
  }
  return Snapshot(s.vocab(), s.size(), std::move(rels));
}

// Stage at which canonical element `elem` appears, simulating the documented
// window rule directly.
std::uint64_t appearance_stage(std::uint64_t seed, std::uint64_t elem) {
  std::vector<std::uint64_t> pool{0, 1, 2, 3};
  std::uint64_t next = 4, front_since = 0;
  for (std::uint64_t stage = 0;; ++stage) {
    std::size_t pick = stage - front_since >= 8 ? 0 : splitmix64(seed ^ splitmix64(stage)) % 4;
    if (pool[pick] == elem) return stage;
    pool.erase(pool.begin() + static_cast<long>(pick));
    pool.push_back(next++);
    if (pick == 0) front_since = stage + 1;
  }
}

}  // namespace

TEST_CASE("restrict examples") {
  auto s = restrict(PresentationStream(all_p(), 0), 2);
  CHECK(s.size() == 3);
  CHECK(s.tuples(0) == std::vector<Tuple>{{0}, {1}, {2}});

  auto w = restrict(PresentationStream(StructureDescriptor::order("w"), 0), 0);
  CHECK(w.size() == 1);
  CHECK(w.relation(0).empty());

  // Canonical ω+ω enumeration alternates blocks: (0,0), (1,0), (0,1), (1,1).
  // Stage elements 0 and 2 lie in the first block, 1 and 3 in the second.
  auto ww = restrict(PresentationStream(StructureDescriptor::order("w+w"), 0), 3);
  std::vector<Tuple> expected{{0, 1}, {0, 2}, {0, 3}, {1, 3}, {2, 1}, {2, 3}};
  CHECK(ww.tuples(0) == expected);
}

TEST_CASE("seeded presentations") {
  CHECK(PresentationStream(all_p(), 0).schedule(5) == std::vector<std::uint64_t>{0, 1, 2, 3, 4, 5});

  auto d = all_p({{0, 1}});
  const auto k = appearance_stage(7, 0);
  auto s = restrict(permuted_presentation(d, 7), k + 3);
  for (std::uint32_t x = 0; x <= k + 3; ++x) CHECK(s.holds(0, {x}) == (x != k));

  auto p = permuted_presentation(StructureDescriptor::order("w"), 3);
  auto sched = p.schedule(9);
  CHECK_FALSE(std::is_sorted(sched.begin(), sched.end()));
  for (std::uint64_t st = 0; st < 10; ++st) CHECK(restrict(p, st + 1).induced(static_cast<std::uint32_t>(st + 1)) == restrict(p, st));
}

TEST_CASE("property: schedules are injective and eventually exhaustive") {
  for (std::uint64_t seed = 1; seed < 50; ++seed) {
    auto sched = PresentationStream(all_p(), seed).schedule(199);
    std::vector<std::uint64_t> sorted = sched;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    // Each element waits at most kWindow * kPatience stages.
    for (std::uint64_t e = 0; e < 150; ++e) CHECK(std::find(sched.begin(), sched.end(), e) != sched.end());
  }
}

TEST_CASE("property: restriction coherence fuzz") {
  gen::Rng rng(2024);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    auto d = gen::descriptor(rng);
    auto p = PresentationStream(d, gen::below(rng, 4) == 0 ? 0 : rng());
    auto s = gen::below(rng, 31);
    if (!(restrict(p, s + 1).induced(static_cast<std::uint32_t>(s + 1)) == restrict(p, s))) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("iso_snapshots examples") {
  auto c2 = chain_snapshot(2);
  Snapshot anti(order_vocabulary(), 2, {{}});
  CHECK(iso_snapshots(c2, c2));
  CHECK_FALSE(iso_snapshots(c2, anti));
  auto c3 = chain_snapshot(3);
  CHECK(iso_snapshots(c3, permuted(c3, {2, 0, 1})));
  CHECK_THROWS(iso_snapshots(c2, Snapshot(unary_vocabulary({"P"}), 2, {{}})));
}

TEST_CASE("property: iso_snapshots is invariant under permutation") {
  gen::Rng rng(5);
  Vocabulary v({{"R", 2}, {"P", 1}});
  for (int i = 0; i < 200; ++i) {
    const auto n = static_cast<std::uint32_t>(1 + gen::below(rng, 6));
    auto a = gen::snapshot(rng, v, n);
    std::vector<std::uint32_t> pi(n);
    std::iota(pi.begin(), pi.end(), 0u);
    std::shuffle(pi.begin(), pi.end(), rng);
    auto b = permuted(a, pi);
    CHECK(iso_snapshots(a, b));
    CHECK(iso_snapshots(b, a));
    auto c = gen::snapshot(rng, v, n);
    // Relation sizes are an invariant; a mismatch must be reported as non-iso.
    bool sizes_equal = a.relation(0).size() == c.relation(0).size() && a.relation(1).size() == c.relation(1).size();
    if (!sizes_equal) CHECK_FALSE(iso_snapshots(a, c));
    CHECK(iso_snapshots(a, c) == iso_snapshots(b, c));
  }
}

TEST_CASE("iso_described examples") {
  CHECK(iso_described(all_p(), all_p()));
  CHECK_FALSE(iso_described(all_p({{0, 1}}), all_p()));
  CHECK(iso_described(all_p({{1, 3}}), all_p()));
  CHECK(iso_described(StructureDescriptor::order("w + w"), StructureDescriptor::order("w*2")));
  CHECK_THROWS(iso_described(all_p(), StructureDescriptor::order("w")));
}

TEST_CASE("property: iso unary descriptors give iso stages") {
  gen::Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    auto a = gen::unary(rng);
    auto b = gen::unary(rng);
    if (!iso_described(a, b)) continue;
    for (std::uint64_t s : {0, 3, 9}) CHECK(iso_snapshots(restrict(PresentationStream(a, 0), s), restrict(PresentationStream(b, 0), s)));
  }
}

TEST_CASE("families") {
  auto f = Family::parity(StructureDescriptor::order("w"), StructureDescriptor::order("w+w"));
  CHECK(f.base_index(0) == 0);
  CHECK(f.base_index(7) == 1);
  auto g = Family::identity({all_p(), all_p({{0, 1}}), all_p({{0, 2}})});
  CHECK(g.base_index(1) == 1);
  CHECK(g.base_index(100) == 2);
}

TEST_CASE("descriptors must be infinite") {
  CHECK_THROWS(StructureDescriptor::order("3"));
  CHECK_NOTHROW(StructureDescriptor::order("3 + w"));
}
