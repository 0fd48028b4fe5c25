#include "ulearn/order_expr.hpp"

#include <cctype>
#include <limits>
#include <utility>

namespace ulearn {

using Kind = OrderExpr::Kind;

OrderExpr OrderExpr::finite(std::uint64_t k) {
  OrderExpr e;
  e.kind = Kind::Fin;
  e.fin = k;
  return e;
}

static OrderExpr atom(Kind k) {
  OrderExpr e;
  e.kind = k;
  return e;
}

OrderExpr OrderExpr::omega() { return atom(Kind::Omega); }
OrderExpr OrderExpr::omega_star() { return atom(Kind::OmegaStar); }
OrderExpr OrderExpr::zeta() { return atom(Kind::Zeta); }
OrderExpr OrderExpr::eta() { return atom(Kind::Eta); }
OrderExpr OrderExpr::big_w() { return atom(Kind::BigW); }

OrderExpr OrderExpr::sum(std::vector<OrderExpr> parts) {
  if (parts.size() < 2) throw std::invalid_argument("Sum needs at least two summands");
  OrderExpr e;
  e.kind = Kind::Sum;
  e.kids = std::move(parts);
  return e;
}

OrderExpr OrderExpr::prod(OrderExpr left, OrderExpr right) {
  OrderExpr e;
  e.kind = Kind::Prod;
  e.kids.reserve(2);
  e.kids.push_back(std::move(left));
  e.kids.push_back(std::move(right));
  return e;
}

ParseError::ParseError(const std::string& what, std::size_t pos)
    : std::runtime_error(what + " at position " + std::to_string(pos)), pos_(pos) {}

// --- parser ----------------------------------------------------------------

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  OrderExpr parse() {
    skip_ws();
    if (pos_ == s_.size()) throw ParseError("empty input", pos_);
    OrderExpr e = expr();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool at_factor_start(std::size_t p) const {
    while (p < s_.size() && std::isspace(static_cast<unsigned char>(s_[p]))) ++p;
    if (p == s_.size()) return false;
    char c = s_[p];
    return c == 'w' || c == 'z' || c == 'q' || c == 'W' || c == '(' ||
           std::isdigit(static_cast<unsigned char>(c));
  }

  OrderExpr expr() {
    std::vector<OrderExpr> terms;
    terms.push_back(term());
    skip_ws();
    while (pos_ < s_.size() && s_[pos_] == '+') {
      ++pos_;
      terms.push_back(term());
      skip_ws();
    }
    if (terms.size() == 1) return std::move(terms.front());
    return OrderExpr::sum(std::move(terms));
  }

  OrderExpr term() {
    OrderExpr acc = factor();
    skip_ws();
    while (pos_ < s_.size() && s_[pos_] == '*') {
      ++pos_;
      acc = OrderExpr::prod(std::move(acc), factor());
      skip_ws();
    }
    return acc;
  }

  OrderExpr factor() {
    skip_ws();
    if (pos_ == s_.size()) throw ParseError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '*') throw ParseError("leading '*'", pos_);
    if (c == 'w') {
      ++pos_;
      std::size_t save = pos_;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '*' && !at_factor_start(pos_ + 1)) {
        ++pos_;
        return OrderExpr::omega_star();
      }
      pos_ = save;
      return OrderExpr::omega();
    }
    if (c == 'z') { ++pos_; return OrderExpr::zeta(); }
    if (c == 'q') { ++pos_; return OrderExpr::eta(); }
    if (c == 'W') { ++pos_; return OrderExpr::big_w(); }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      std::uint64_t v = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        std::uint64_t d = static_cast<std::uint64_t>(s_[pos_] - '0');
        if (v > (std::numeric_limits<std::uint64_t>::max() - d) / 10)
          throw ParseError("natural number too large", start);
        v = v * 10 + d;
        ++pos_;
      }
      return OrderExpr::finite(v);
    }
    if (c == '(') {
      std::size_t open = pos_;
      ++pos_;
      OrderExpr e = expr();
      skip_ws();
      if (pos_ == s_.size() || s_[pos_] != ')') throw ParseError("unbalanced '('", open);
      ++pos_;
      return e;
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

OrderExpr parse_expr(std::string_view text) { return Parser(text).parse(); }

// --- printing --------------------------------------------------------------

static void print(const OrderExpr& e, std::string& out) {
  switch (e.kind) {
    case Kind::Fin: out += std::to_string(e.fin); return;
    case Kind::Omega: out += "w"; return;
    case Kind::OmegaStar: out += "w*"; return;
    case Kind::Zeta: out += "z"; return;
    case Kind::Eta: out += "q"; return;
    case Kind::BigW: out += "W"; return;
    case Kind::Sum:
      for (std::size_t i = 0; i < e.kids.size(); ++i) {
        if (i) out += " + ";
        bool paren = e.kids[i].is(Kind::Sum);
        if (paren) out += '(';
        print(e.kids[i], out);
        if (paren) out += ')';
      }
      return;
    case Kind::Prod: {
      const auto& l = e.left();
      const auto& r = e.right();
      bool pl = l.is(Kind::Sum) || l.is(Kind::OmegaStar);
      bool pr = r.is(Kind::Sum) || r.is(Kind::Prod) || r.is(Kind::OmegaStar);
      if (pl) out += '(';
      print(l, out);
      if (pl) out += ')';
      out += '*';
      if (pr) out += '(';
      print(r, out);
      if (pr) out += ')';
      return;
    }
  }
}

std::string to_string(const OrderExpr& e) {
  std::string out;
  print(e, out);
  return out;
}

Card cardinality(const OrderExpr& e) {
  switch (e.kind) {
    case Kind::Fin: return Card(e.fin);
    case Kind::Sum: {
      Card c(0);
      for (const auto& k : e.kids) c = c + cardinality(k);
      return c;
    }
    case Kind::Prod: return cardinality(e.left()) * cardinality(e.right());
    default: return Card::infinite();
  }
}

bool contains_w(const OrderExpr& e) {
  if (e.is(Kind::BigW)) return true;
  for (const auto& k : e.kids)
    if (contains_w(k)) return true;
  return false;
}

bool w_absorbable(const OrderExpr& e) {
  switch (e.kind) {
    case Kind::Fin:
    case Kind::Omega: return true;
    case Kind::Sum:
    case Kind::Prod:
      for (const auto& k : e.kids)
        if (!w_absorbable(k)) return false;
      return true;
    default: return false;
  }
}

// --- rules -----------------------------------------------------------------

std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::ExpandZeta: return "expand-zeta";
    case Rule::FlattenSum: return "flatten-sum";
    case Rule::DropZero: return "drop-zero";
    case Rule::MergeFinite: return "merge-finite";
    case Rule::ProdUnit: return "prod-unit";
    case Rule::ProdZero: return "prod-zero";
    case Rule::UnfoldFinite: return "unfold-finite";
    case Rule::FiniteTimesOmega: return "finite-times-omega";
    case Rule::DistributeRight: return "distribute-right";
    case Rule::AbsorbIntoW: return "absorb-into-w";
    case Rule::EtaAbsorb: return "eta-absorb";
    case Rule::PseudoWellOrder: return "pseudo-well-order";
    case Rule::AbsorbTimesW: return "absorb-times-w";
  }
  return "?";
}

namespace {

// Unfolding bigger finite right factors is left to the caller's patience.
constexpr std::uint64_t kMaxUnfold = 1024;

OrderExpr sum_or_single(std::vector<OrderExpr> parts) {
  if (parts.empty()) return OrderExpr::finite(0);
  if (parts.size() == 1) return std::move(parts.front());
  return OrderExpr::sum(std::move(parts));
}

void flatten_into(const OrderExpr& e, std::vector<OrderExpr>& out) {
  if (e.is(Kind::Sum)) {
    for (const auto& k : e.kids) flatten_into(k, out);
  } else {
    out.push_back(e);
  }
}

// X with u = X*q, or X = 1 when u = q.
const OrderExpr* eta_base(const OrderExpr& u, const OrderExpr& one) {
  if (u.is(Kind::Eta)) return &one;
  if (u.is(Kind::Prod) && u.right().is(Kind::Eta)) return &u.left();
  return nullptr;
}

bool sum_rule(Rule r, const OrderExpr& e, OrderExpr& out) {
  const auto& ks = e.kids;
  switch (r) {
    case Rule::FlattenSum: {
      bool any = false;
      for (const auto& k : ks) any = any || k.is(Kind::Sum);
      if (!any) return false;
      std::vector<OrderExpr> parts;
      flatten_into(e, parts);
      out = sum_or_single(std::move(parts));
      return true;
    }
    case Rule::DropZero: {
      std::vector<OrderExpr> parts;
      for (const auto& k : ks)
        if (!(k.is(Kind::Fin) && k.fin == 0)) parts.push_back(k);
      if (parts.size() == ks.size()) return false;
      out = sum_or_single(std::move(parts));
      return true;
    }
    case Rule::MergeFinite:
      for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
        if (ks[i].is(Kind::Fin) && ks[i + 1].is(Kind::Fin)) {
          std::vector<OrderExpr> parts(ks.begin(), ks.begin() + static_cast<std::ptrdiff_t>(i));
          parts.push_back(OrderExpr::finite(ks[i].fin + ks[i + 1].fin));
          parts.insert(parts.end(), ks.begin() + static_cast<std::ptrdiff_t>(i + 2), ks.end());
          out = sum_or_single(std::move(parts));
          return true;
        }
      }
      return false;
    case Rule::AbsorbIntoW:
      for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
        if (ks[i + 1].is(Kind::BigW) && w_absorbable(ks[i])) {
          std::vector<OrderExpr> parts;
          for (std::size_t j = 0; j < ks.size(); ++j)
            if (j != i) parts.push_back(ks[j]);
          out = sum_or_single(std::move(parts));
          return true;
        }
      }
      return false;
    case Rule::EtaAbsorb: {
      const OrderExpr one = OrderExpr::finite(1);
      for (std::size_t i = 0; i < ks.size(); ++i) {
        const OrderExpr* base = eta_base(ks[i], one);
        if (!base) continue;
        std::vector<OrderExpr> want;
        flatten_into(*base, want);
        for (std::size_t j = i + 2; j < ks.size(); ++j) {
          const OrderExpr* other = eta_base(ks[j], one);
          if (!other || !(*other == *base)) continue;
          std::vector<OrderExpr> middle;
          for (std::size_t m = i + 1; m < j; ++m) flatten_into(ks[m], middle);
          if (middle != want) continue;
          std::vector<OrderExpr> parts(ks.begin(), ks.begin() + static_cast<std::ptrdiff_t>(i + 1));
          parts.insert(parts.end(), ks.begin() + static_cast<std::ptrdiff_t>(j + 1), ks.end());
          out = sum_or_single(std::move(parts));
          return true;
        }
      }
      return false;
    }
    default: return false;
  }
}

bool prod_rule(Rule r, const OrderExpr& e, OrderExpr& out) {
  const auto& l = e.left();
  const auto& rt = e.right();
  auto is_fin = [](const OrderExpr& x, std::uint64_t k) { return x.is(Kind::Fin) && x.fin == k; };
  switch (r) {
    case Rule::ProdUnit:
      if (is_fin(rt, 1)) { out = l; return true; }
      if (is_fin(l, 1)) { out = rt; return true; }
      return false;
    case Rule::ProdZero:
      if (is_fin(l, 0) || is_fin(rt, 0)) { out = OrderExpr::finite(0); return true; }
      return false;
    case Rule::UnfoldFinite:
      if (rt.is(Kind::Fin) && rt.fin >= 2 && rt.fin <= kMaxUnfold) {
        out = OrderExpr::sum(std::vector<OrderExpr>(rt.fin, l));
        return true;
      }
      return false;
    case Rule::FiniteTimesOmega:
      if (l.is(Kind::Fin) && l.fin >= 1 && (rt.is(Kind::Omega) || rt.is(Kind::OmegaStar))) {
        out = rt;
        return true;
      }
      return false;
    case Rule::AbsorbTimesW:
      if (rt.is(Kind::BigW) && w_absorbable(l) && cardinality(l) != Card(0)) {
        out = rt;
        return true;
      }
      return false;
    case Rule::DistributeRight:
      if (rt.is(Kind::Sum)) {
        std::vector<OrderExpr> parts;
        parts.reserve(rt.kids.size());
        for (const auto& b : rt.kids) parts.push_back(OrderExpr::prod(l, b));
        out = OrderExpr::sum(std::move(parts));
        return true;
      }
      return false;
    case Rule::PseudoWellOrder: {
      if (!rt.is(Kind::Omega) || !l.is(Kind::Sum) || l.kids.size() < 2) return false;
      const OrderExpr w = OrderExpr::big_w();
      const OrderExpr w_eta = OrderExpr::prod(w, OrderExpr::eta());
      if (!(l.kids[0] == w) || !(l.kids[1] == w_eta)) return false;
      for (std::size_t i = 2; i < l.kids.size(); ++i)
        if (!w_absorbable(l.kids[i])) return false;
      out = OrderExpr::sum({w, w_eta});
      return true;
    }
    default: return false;
  }
}

}  // namespace

bool apply_rule_at_root(Rule r, const OrderExpr& e, OrderExpr& out) {
  if (r == Rule::ExpandZeta) {
    if (!e.is(Kind::Zeta)) return false;
    out = OrderExpr::sum({OrderExpr::omega_star(), OrderExpr::omega()});
    return true;
  }
  if (e.is(Kind::Sum)) return sum_rule(r, e, out);
  if (e.is(Kind::Prod)) return prod_rule(r, e, out);
  return false;
}

OrderExpr normalize(const OrderExpr& e) {
  OrderExpr cur = e;
  for (auto& k : cur.kids) k = normalize(k);
  for (std::size_t i = 0; i < kRuleCount; ++i) {
    OrderExpr next;
    if (apply_rule_at_root(static_cast<Rule>(i), cur, next)) return normalize(next);
  }
  return cur;
}

namespace {

struct Redex {
  std::vector<std::size_t> path;
  Rule rule;
};

void collect_redexes(const OrderExpr& e, std::vector<std::size_t>& path, std::vector<Redex>& out) {
  OrderExpr scratch;
  for (std::size_t i = 0; i < kRuleCount; ++i) {
    auto r = static_cast<Rule>(i);
    if (apply_rule_at_root(r, e, scratch)) out.push_back({path, r});
  }
  for (std::size_t i = 0; i < e.kids.size(); ++i) {
    path.push_back(i);
    collect_redexes(e.kids[i], path, out);
    path.pop_back();
  }
}

void rewrite_at(OrderExpr& e, const Redex& rx, std::size_t depth) {
  if (depth == rx.path.size()) {
    OrderExpr next;
    apply_rule_at_root(rx.rule, e, next);
    e = std::move(next);
    return;
  }
  rewrite_at(e.kids[rx.path[depth]], rx, depth + 1);
}

}  // namespace

OrderExpr normalize_random(const OrderExpr& e, std::mt19937_64& rng) {
  OrderExpr cur = e;
  std::vector<Redex> redexes;
  std::vector<std::size_t> path;
  for (;;) {
    redexes.clear();
    collect_redexes(cur, path, redexes);
    if (redexes.empty()) return cur;
    std::uniform_int_distribution<std::size_t> pick(0, redexes.size() - 1);
    rewrite_at(cur, redexes[pick(rng)], 0);
  }
}

bool expr_equal(const OrderExpr& a, const OrderExpr& b) { return normalize(a) == normalize(b); }

}  // namespace ulearn
