#include <algorithm>

#include "doctest.h"
#include "gen.hpp"
#include "ulearn/sessions.hpp"

using namespace ulearn;

namespace {

Literal lit(std::string rel, std::vector<std::uint32_t> args, bool neg = false) {
  return Literal{std::move(rel), std::move(args), neg};
}
Sigma2Sentence phi_all() { return {0, 1, {{lit("P", {0})}}, std::nullopt}; }
Sigma2Sentence phi_one() { return {1, 1, {{lit("P", {0}, true)}, {lit("=", {1, 0}), lit("P", {1})}}, std::nullopt}; }

StructureDescriptor unary(std::map<UnaryType, std::uint64_t> exc, UnaryType tail = 1, std::size_t preds = 1) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < preds; ++i) names.push_back(preds == 1 ? "P" : "P" + std::to_string(i));
  return StructureDescriptor::unary({unary_vocabulary(names), std::move(exc), tail});
}
StructureDescriptor all_p() { return unary({}); }
StructureDescriptor one_not_p() { return unary({{0, 1}}); }
StructureDescriptor order(const char* s) { return StructureDescriptor::order(s); }

Card count(const StructureDescriptor& d, UnaryType t) {
  const auto& u = d.as_unary();
  if (t == u.tail) return Card::infinite();
  auto it = u.exceptional.find(t);
  return Card(it == u.exceptional.end() ? 0 : it->second);
}

// Condition (3) on unary families from the count closed form: a pointed
// (A, ā) ≤1 (B, b̄) with matching type multisets iff A has at least as many
// elements of every type as B.
bool unary_condition3(const Family& fam, unsigned bound, std::size_t preds) {
  const auto& base = fam.base();
  const UnaryType ntypes = UnaryType{1} << preds;
  auto realizable = [&](const std::vector<unsigned>& m, const StructureDescriptor& d) {
    for (UnaryType t = 0; t < ntypes; ++t)
      if (Card(m[t]) > count(d, t)) return false;
    return true;
  };
  for (const auto& ai : base) {
    bool found = false;
    // All multisets of size <= bound as count vectors.
    std::vector<unsigned> m(ntypes, 0);
    std::function<void(UnaryType, unsigned)> rec = [&](UnaryType t, unsigned left) {
      if (found) return;
      if (t == ntypes) {
        if (!realizable(m, ai)) return;
        for (const auto& aj : base) {
          if (iso_described(ai, aj) || !realizable(m, aj)) continue;
          bool below_somewhere = false;
          for (UnaryType s = 0; s < ntypes; ++s)
            if (count(ai, s) < count(aj, s)) below_somewhere = true;
          if (!below_somewhere) return;
        }
        found = true;
        return;
      }
      for (unsigned k = 0; k <= left; ++k) {
        m[t] = k;
        rec(t + 1, left - k);
      }
      m[t] = 0;
    };
    rec(0, bound);
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("stabilization_point") {
  CHECK(stabilization_point({0, 0, 0}) == 0u);
  CHECK(stabilization_point({3, 1, 1}) == 1u);
  CHECK_FALSE(stabilization_point({1, 1, 2}).has_value());
  CHECK(stabilization_point({5}) == 0u);
}

TEST_CASE("run_session examples") {
  auto fam = Family::parity(all_p(), one_not_p());
  auto r = run_session(fam, PresentationStream(all_p(), 3), Learner::constant(0), 10);
  CHECK(r.trace == std::vector<std::uint64_t>(11, 0));
  CHECK(r.stabilized_at == 0u);

  auto c = run_session(fam, PresentationStream(all_p(), 0), counter_learner(phi_all(), phi_one()), 20);
  for (std::uint64_t s = 0; s <= 20; ++s) CHECK(c.trace[s] == 2 * s + 2);
  CHECK_FALSE(c.stabilized_at.has_value());
  CHECK(c.final == 42);

  auto two = Family::identity({all_p(), one_not_p()});
  auto q = run_session(two, PresentationStream(one_not_p(), 0), qss_learner({phi_all(), phi_one()}), 50);
  CHECK(q.stabilized_at.has_value());
  CHECK(q.final == 1);
  CHECK_THROWS(run_session(two, PresentationStream(one_not_p(), 0), Learner::constant(0), 0));
}

TEST_CASE("evaluate_success examples") {
  auto fam = Family::parity(all_p(), one_not_p());
  auto c = run_session(fam, PresentationStream(all_p(), 0), counter_learner(phi_all(), phi_one()), 30);
  CHECK(evaluate_success(c, fam, all_p(), SuccessMode::Bc, 10));
  CHECK_FALSE(evaluate_success(c, fam, all_p(), SuccessMode::Ex, 10));
  CHECK(evaluate_success_report(c, fam, all_p(), SuccessMode::Ex, 10).diagnostic == "no stabilization at horizon");

  SessionResult flicker{{0, 1, 0, 1, 0, 1}, std::nullopt, 1, 5, "", ""};
  CHECK_FALSE(evaluate_success(flicker, fam, all_p(), SuccessMode::Bc, 2));
  SessionResult stable{{1, 0, 0, 0}, 1, 0, 3, "", ""};
  CHECK(evaluate_success(stable, fam, all_p(), SuccessMode::Ex, 0));
  CHECK_FALSE(evaluate_success(stable, fam, one_not_p(), SuccessMode::Ex, 0));
  CHECK_THROWS(evaluate_success(stable, fam, all_p(), SuccessMode::Bc, 4));
}

TEST_CASE("property: Ex at horizon implies Bc on the stable window") {
  gen::Rng rng(6);
  auto fam = Family::identity({all_p(), one_not_p(), unary({{0, 2}})});
  auto l = family_qss_learner(fam, 2, 4);
  for (int i = 0; i < 30; ++i) {
    const auto& truth = fam.base()[gen::below(rng, 3)];
    auto r = run_session(fam, PresentationStream(truth, rng()), l, 40);
    if (evaluate_success(r, fam, truth, SuccessMode::Ex, 0))
      CHECK(evaluate_success(r, fam, truth, SuccessMode::Bc, r.horizon - *r.stabilized_at));
  }
}

TEST_CASE("swap experiment") {
  auto a1 = all_p(), a2 = one_not_p();
  std::vector<std::uint64_t> seeds{0, 1, 2};
  auto id = swap_experiment(identity_translation(), a1, a2, phi_all(), phi_one(), 60, seeds);
  CHECK(id.outcome == Verdict::Outcome::NoRefutationFound);
  REQUIRE(id.diagnostics.size() == 3);
  CHECK(id.diagnostics[0] == "seed 0: no stabilization at horizon");

  auto mi = swap_experiment(min_iso_translation(), a1, a2, phi_all(), phi_one(), 60, seeds);
  CHECK(mi.outcome == Verdict::Outcome::NoRefutationFound);
  auto e2 = swap_experiment(equiv2_translation(), a1, a2, phi_all(), phi_one(), 60, seeds);
  CHECK(e2.outcome == Verdict::Outcome::NoRefutationFound);

  auto fr = swap_experiment(freeze_translation(), a1, a2, phi_all(), phi_one(), 60, seeds);
  REQUIRE(fr.outcome == Verdict::Outcome::RefutedAtHorizon);
  REQUIRE(fr.evidence.has_value());
  // Stage 0 of an all-P presentation: the counter learner answers 2.
  CHECK(fr.evidence->n == 2);
  CHECK(fr.evidence->swapped.base_index(2) == 1);
  CHECK(std::all_of(fr.evidence->failing_segment.begin(), fr.evidence->failing_segment.end(), [](auto v) { return v == 2; }));

  auto again = swap_experiment(freeze_translation(), a1, a2, phi_all(), phi_one(), 60, seeds);
  CHECK(again.diagnostics == fr.diagnostics);
  CHECK(again.evidence->failing_segment == fr.evidence->failing_segment);

  CHECK_THROWS_AS(swap_experiment(min_iso_translation(), a1, all_p(), phi_all(), phi_one(), 10, seeds), PreconditionError);
}

TEST_CASE("swapped parity family") {
  auto a1 = all_p(), a2 = one_not_p();
  auto even = swapped_parity_family(a1, a2, 4);
  auto odd = swapped_parity_family(a1, a2, 3);
  for (std::uint64_t i = 0; i < 10; ++i) {
    CHECK(even.base_index(i) == (i == 4 ? 1u : i % 2));
    CHECK(odd.base_index(i) == (i == 3 ? 0u : i % 2));
  }
}

TEST_CASE("condition3 examples") {
  auto two = Family::identity({all_p(), one_not_p()});
  CHECK(condition3_check(two, 2, 4));
  CHECK(condition3a_check(two, 2, 4));
  auto w = condition3_witnesses(two, 2, 4);
  REQUIRE(w[0].has_value());
  REQUIRE(w[1].has_value());
  CHECK(std::get<std::vector<UnaryType>>(*w[0]).empty());
  CHECK(std::get<std::vector<UnaryType>>(*w[1]) == std::vector<UnaryType>{0});

  auto orders = Family::identity({order("w"), order("w+w")});
  CHECK_FALSE(condition3_check(orders, 3, 4));
  CHECK_FALSE(condition3a_check(orders, 3, 4));
  CHECK(condition3_check(Family::identity({order("w")}), 2, 4));
  CHECK(condition3_check(Family::identity({order("w"), order("w*")}), 2, 4));

  try {
    condition3a_check(Family::identity({all_p(), unary({{1, 4}})}), 2, 4);
    FAIL("no throw");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()) == "duplicates");
  }
}

TEST_CASE("property: condition3 on unary families matches the count closed form") {
  gen::Rng rng(41);
  for (int i = 0; i < 120; ++i) {
    const std::size_t preds = 1 + gen::below(rng, 2);
    std::vector<StructureDescriptor> base;
    const auto k = 1 + gen::below(rng, 3);
    for (std::uint64_t j = 0; j < k; ++j) base.push_back(gen::unary(rng, preds));
    Family fam = Family::identity(base);
    CHECK(condition3_check(fam, 2, 5) == unary_condition3(fam, 2, preds));
    bool distinct = true;
    for (std::size_t a = 0; a < base.size(); ++a)
      for (std::size_t b = a + 1; b < base.size(); ++b)
        if (iso_described(base[a], base[b])) distinct = false;
    if (distinct && condition3a_check(fam, 2, 5)) CHECK(condition3_check(fam, 2, 5));
  }
}

TEST_CASE("witness sentences hold in their own structure") {
  auto fam = Family::identity({all_p(), one_not_p(), unary({{0, 2}})});
  auto ws = condition3_witnesses(fam, 2, 4);
  for (std::size_t i = 0; i < ws.size(); ++i) {
    REQUIRE(ws[i].has_value());
    auto phi = witness_sentence(fam.base()[i], *ws[i], 4);
    for (std::size_t j = 0; j < ws.size(); ++j) {
      auto s = restrict(PresentationStream(fam.base()[j], 0), 12);
      if (i == j) CHECK(eval_sigma2_bounded(s, phi));
    }
  }
  auto ow = condition3_witnesses(Family::identity({order("w"), order("w*")}), 2, 4);
  REQUIRE(ow[1].has_value());
  auto phi = witness_sentence(order("w*"), *ow[1], 4);
  CHECK(eval_sigma2_bounded(restrict(PresentationStream(order("w*"), 0), 15), phi));
}

TEST_CASE("family qss learner learns a separable family") {
  auto fam = Family::identity({all_p(), one_not_p(), unary({{0, 2}})});
  auto l = family_qss_learner(fam, 2, 4);
  for (std::size_t i = 0; i < fam.base().size(); ++i)
    for (std::uint64_t seed : {0ull, 5ull, 99ull}) {
      auto r = run_session(fam, PresentationStream(fam.base()[i], seed), l, 60);
      CHECK(evaluate_success(r, fam, fam.base()[i], SuccessMode::Ex, 0));
    }
}
