#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ulearn/card.hpp"

namespace ulearn {

// Term over the linear-order constructors.  Prod(a, b) is a·b: b-many
// copies of a, i.e. every point of b is replaced by a copy of a.
struct OrderExpr {
  enum class Kind : std::uint8_t { Fin, Omega, OmegaStar, Zeta, Eta, BigW, Sum, Prod };

  Kind kind = Kind::Fin;
  std::uint64_t fin = 0;       // only for Fin
  std::vector<OrderExpr> kids; // Sum: >= 2 summands; Prod: {left, right}

  static OrderExpr finite(std::uint64_t k);
  static OrderExpr omega();
  static OrderExpr omega_star();
  static OrderExpr zeta();
  static OrderExpr eta();
  static OrderExpr big_w();
  static OrderExpr sum(std::vector<OrderExpr> parts);
  static OrderExpr prod(OrderExpr left, OrderExpr right);

  bool is(Kind k) const { return kind == k; }
  const OrderExpr& left() const { return kids.at(0); }
  const OrderExpr& right() const { return kids.at(1); }

  bool operator==(const OrderExpr&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t pos);
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

// Grammar:
//   expr   := term ('+' term)*
//   term   := factor ('*' factor)*
//   factor := 'w' | 'w*' | 'z' | 'q' | 'W' | natural | '(' expr ')'
// "w*" is read as omega-star unless the '*' is followed by the start of a
// factor, in which case it is multiplication ("w*2" is ω·2, "w* + 1" is ω*+1,
// "w**2" is ω*·2).
OrderExpr parse_expr(std::string_view text);

// Prints in the grammar above; parse_expr(to_string(e)) == e.
std::string to_string(const OrderExpr& e);

Card cardinality(const OrderExpr& e);

bool contains_w(const OrderExpr& e);

// Built from Fin and ω with sums and products only: denotes a countable well
// order, so it is absorbed by a following W.
bool w_absorbable(const OrderExpr& e);

// --- rewriting -------------------------------------------------------------

enum class Rule : std::uint8_t {
  ExpandZeta,       // z -> w* + w
  FlattenSum,       // nested sums are spliced
  DropZero,         // 0 summands vanish
  MergeFinite,      // j + k -> (j+k)
  ProdUnit,         // x*1 -> x, 1*x -> x
  ProdZero,         // x*0 -> 0, 0*x -> 0
  UnfoldFinite,     // x*k -> x + ... + x  (k >= 2)
  FiniteTimesOmega, // k*w -> w, k*w* -> w*  (k >= 1)
  DistributeRight,  // x*(a + b) -> x*a + x*b
  AbsorbIntoW,      // a + W -> W  (a W-absorbable)
  EtaAbsorb,        // X*q + X + X*q -> X*q
  PseudoWellOrder,  // (W + W*q + r)*w -> W + W*q  (r W-absorbable)
  AbsorbTimesW,     // a*W -> W  (a W-absorbable and nonempty)
};
inline constexpr std::size_t kRuleCount = 13;
std::string_view rule_name(Rule r);

// Applies rule r at the root of e, if it matches.
bool apply_rule_at_root(Rule r, const OrderExpr& e, OrderExpr& out);

// Innermost-first rewriting to a fixed point.
OrderExpr normalize(const OrderExpr& e);

// Rewrites by repeatedly picking a uniformly random (position, rule) redex
// until none remains.  Used to check that the rule set is confluent.
OrderExpr normalize_random(const OrderExpr& e, std::mt19937_64& rng);

// Sound but incomplete isomorphism test: equal normal forms.
bool expr_equal(const OrderExpr& a, const OrderExpr& b);

}  // namespace ulearn
