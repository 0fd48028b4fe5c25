#include "ulearn/bfgame.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

namespace ulearn {

// --- snapshot boards -----------------------------------------------------------

namespace {

// Dense relation tables for fast atomic lookups on small snapshots.
class Board {
 public:
  explicit Board(const Snapshot& s) : s_(&s), n_(s.size()) {
    for (std::size_t r = 0; r < s.vocab().size(); ++r) {
      const auto arity = s.vocab()[r].arity;
      std::uint64_t cells = 1;
      for (std::uint32_t i = 0; i < arity; ++i) {
        cells *= std::max<std::uint32_t>(n_, 1);
        if (cells > (1u << 22)) throw Unsupported("snapshot too large for game search");
      }
      std::vector<std::uint8_t> table(cells, 0);
      for (const auto& t : s.relation(r)) table[index(t.data(), arity)] = 1;
      tables_.push_back(std::move(table));
      arities_.push_back(arity);
    }
  }

  std::uint32_t size() const { return n_; }
  std::size_t relations() const { return tables_.size(); }
  std::uint32_t arity(std::size_t r) const { return arities_[r]; }

  bool holds(std::size_t r, const std::uint32_t* args) const { return tables_[r][index(args, arities_[r])]; }

 private:
  std::uint64_t index(const std::uint32_t* args, std::uint32_t arity) const {
    std::uint64_t idx = 0;
    for (std::uint32_t i = 0; i < arity; ++i) idx = idx * n_ + args[i];
    return idx;
  }

  const Snapshot* s_;
  std::uint32_t n_;
  std::vector<std::vector<std::uint8_t>> tables_;
  std::vector<std::uint32_t> arities_;
};

// Calls f(args) for every tuple of positions in [0, len)^arity that mentions
// position `must` (or every tuple when must == npos).  Stops when f returns
// false.
constexpr std::size_t kNoPos = std::numeric_limits<std::size_t>::max();

template <class F>
bool for_position_tuples(std::size_t len, std::uint32_t arity, std::size_t must, F&& f) {
  if (len == 0) return true;
  std::vector<std::size_t> pos(arity, 0);
  for (;;) {
    bool mentions = must == kNoPos;
    for (auto p : pos) mentions = mentions || p == must;
    if (mentions && !f(pos)) return false;
    std::size_t i = 0;
    while (i < arity && ++pos[i] == len) pos[i++] = 0;
    if (i == arity) return true;
  }
}

// Atomic agreement of ā (in A) and b̄ (in B) on the formulas mentioning
// position `must` among the first `len` positions.
bool atomic_agree(const Board& A, const Tuple& at, const Board& B, const Tuple& bt, std::size_t len,
                  std::size_t must) {
  for (std::size_t i = 0; i < len; ++i)
    for (std::size_t j = i + 1; j < len; ++j) {
      if (must != kNoPos && i != must && j != must) continue;
      if ((at[i] == at[j]) != (bt[i] == bt[j])) return false;
    }
  std::uint32_t abuf[16], bbuf[16];
  for (std::size_t r = 0; r < A.relations(); ++r) {
    const auto arity = A.arity(r);
    if (arity > 16) throw Unsupported("relation arity above 16");
    bool ok = for_position_tuples(len, arity, must, [&](const std::vector<std::size_t>& pos) {
      for (std::uint32_t k = 0; k < arity; ++k) {
        abuf[k] = at[pos[k]];
        bbuf[k] = bt[pos[k]];
      }
      return A.holds(r, abuf) == B.holds(r, bbuf);
    });
    if (!ok) return false;
  }
  return true;
}

bool contains(const Tuple& t, std::uint32_t x) { return std::find(t.begin(), t.end(), x) != t.end(); }

struct Game {
  // (A, at) ≤n (B, bt), remaining budget of picked elements.
  bool leq(const Board& A, Tuple& at, const Board& B, Tuple& bt, unsigned n, std::size_t budget) const {
    if (n == 0) return atomic_agree(A, at, B, bt, at.size(), kNoPos);
    for (unsigned m = 0; m < n; ++m) {
      if (!forall_ext(A, at, B, bt, m, budget, 0)) return false;
    }
    return true;
  }

  // ∀ d̄ extending bt by fresh distinct elements (d̄ currently of length len).
  bool forall_ext(const Board& A, Tuple& at, const Board& B, Tuple& bt, unsigned m, std::size_t budget,
                  std::size_t len) const {
    if (!exists_ext(A, at, B, bt, m, budget, len, 0)) return false;
    if (len == budget) return true;
    for (std::uint32_t y = 0; y < B.size(); ++y) {
      if (contains(bt, y)) continue;
      bt.push_back(y);
      bool ok = forall_ext(A, at, B, bt, m, budget, len + 1);
      bt.pop_back();
      if (!ok) return false;
    }
    return true;
  }

  // ∃ c̄ of length len in A with (B, bt) ≤m (A, at c̄); `placed` entries of
  // c̄ are already pushed onto at.
  bool exists_ext(const Board& A, Tuple& at, const Board& B, Tuple& bt, unsigned m, std::size_t budget,
                  std::size_t len, std::size_t placed) const {
    if (placed == len) return leq(B, bt, A, at, m, budget - len);
    for (std::uint32_t x = 0; x < A.size(); ++x) {
      if (contains(at, x)) continue;
      at.push_back(x);
      bool ok = atomic_agree(A, at, B, bt, at.size(), at.size() - 1) &&
                exists_ext(A, at, B, bt, m, budget, len, placed + 1);
      at.pop_back();
      if (ok) return true;
    }
    return false;
  }
};

void check_pointed_pair(const PointedSnapshot& a, const PointedSnapshot& b) {
  if (a.tuple.size() != b.tuple.size()) throw std::invalid_argument("tuple length mismatch");
  if (!(a.snapshot.vocab() == b.snapshot.vocab())) throw std::invalid_argument("vocabulary mismatch");
  for (auto x : a.tuple)
    if (x >= a.snapshot.size()) throw std::invalid_argument("tuple entry outside the domain");
  for (auto x : b.tuple)
    if (x >= b.snapshot.size()) throw std::invalid_argument("tuple entry outside the domain");
}

}  // namespace

bool leq0(const PointedSnapshot& a, const PointedSnapshot& b, Leq0Mode mode) {
  check_pointed_pair(a, b);
  Board A(a.snapshot), B(b.snapshot);
  const std::size_t len = a.tuple.size();
  if (mode.kind == Leq0Mode::Kind::AllAtomic) return atomic_agree(A, a.tuple, B, b.tuple, len, kNoPos);

  // Walk the level enumeration until k formulas have been seen.
  std::size_t seen = 0;
  std::uint32_t abuf[16], bbuf[16];
  for (std::size_t v = 0; seen < mode.k; ++v) {
    for (std::size_t i = 0; i <= v && seen < mode.k; ++i, ++seen) {
      if (v >= len) continue;
      if ((a.tuple[i] == a.tuple[v]) != (b.tuple[i] == b.tuple[v])) return false;
    }
    for (std::size_t r = 0; r < A.relations() && seen < mode.k; ++r) {
      const auto arity = A.arity(r);
      bool ok = for_position_tuples(v + 1, arity, v, [&](const std::vector<std::size_t>& pos) {
        if (seen >= mode.k) return false;
        ++seen;
        if (v >= len) return true;
        for (std::uint32_t k = 0; k < arity; ++k) {
          abuf[k] = a.tuple[pos[k]];
          bbuf[k] = b.tuple[pos[k]];
        }
        if (A.holds(r, abuf) != B.holds(r, bbuf)) {
          seen = kNoPos;  // mismatch marker
          return false;
        }
        return true;
      });
      if (seen == kNoPos) return false;
      (void)ok;
    }
  }
  return true;
}

bool leq_n_snapshots(const PointedSnapshot& a, const PointedSnapshot& b, unsigned n,
                     std::optional<std::size_t> var_budget) {
  check_pointed_pair(a, b);
  Board A(a.snapshot), B(b.snapshot);
  Tuple at = a.tuple, bt = b.tuple;
  std::size_t budget = var_budget.value_or(std::numeric_limits<std::size_t>::max() / 2);
  return Game{}.leq(A, at, B, bt, n, budget);
}

namespace {

bool exhaustive(const Board& A, Tuple& at, const Board& B, Tuple& bt, unsigned n, std::size_t max_len);

bool exhaustive_exists(const Board& A, Tuple& at, const Board& B, Tuple& bt, unsigned m, std::size_t max_len,
                       std::size_t len, std::size_t placed) {
  if (placed == len) return exhaustive(B, bt, A, at, m, max_len);
  for (std::uint32_t x = 0; x < A.size(); ++x) {
    at.push_back(x);
    bool ok = exhaustive_exists(A, at, B, bt, m, max_len, len, placed + 1);
    at.pop_back();
    if (ok) return true;
  }
  return false;
}

bool exhaustive_forall(const Board& A, Tuple& at, const Board& B, Tuple& bt, unsigned m, std::size_t max_len,
                       std::size_t len) {
  if (!exhaustive_exists(A, at, B, bt, m, max_len, len, 0)) return false;
  if (len == max_len) return true;
  for (std::uint32_t y = 0; y < B.size(); ++y) {
    bt.push_back(y);
    bool ok = exhaustive_forall(A, at, B, bt, m, max_len, len + 1);
    bt.pop_back();
    if (!ok) return false;
  }
  return true;
}

bool exhaustive(const Board& A, Tuple& at, const Board& B, Tuple& bt, unsigned n, std::size_t max_len) {
  if (n == 0) return atomic_agree(A, at, B, bt, at.size(), kNoPos);
  for (unsigned m = 0; m < n; ++m)
    if (!exhaustive_forall(A, at, B, bt, m, max_len, 0)) return false;
  return true;
}

}  // namespace

bool leq_n_snapshots_exhaustive(const PointedSnapshot& a, const PointedSnapshot& b, unsigned n,
                                std::size_t max_len) {
  check_pointed_pair(a, b);
  Board A(a.snapshot), B(b.snapshot);
  Tuple at = a.tuple, bt = b.tuple;
  return exhaustive(A, at, B, bt, n, max_len);
}

// --- unary counting game ---------------------------------------------------------

namespace {

constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();

using Counts = std::vector<std::uint64_t>;

struct UnaryGame {
  unsigned cap;
  std::map<std::tuple<Counts, Counts, unsigned>, bool> memo;

  // (A) ≤n (B) with matched tuples already removed from both.
  bool leq(const Counts& ra, const Counts& rb, unsigned n) {
    if (n == 0) return true;
    auto key = std::make_tuple(ra, rb, n);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    bool result = true;
    for (unsigned m = 0; m < n && result; ++m) {
      Counts move(rb.size(), 0);
      result = forall_moves(ra, rb, m, move, 0, 0);
    }
    memo.emplace(std::move(key), result);
    return result;
  }

  // ∀ multiset `move` drawn from B (size <= cap), ∃ the same multiset in A
  // (forced: 1-types must match) with (B - move) ≤m (A - move).
  bool forall_moves(const Counts& ra, const Counts& rb, unsigned m, Counts& move, std::size_t type,
                    unsigned used) {
    if (type == rb.size()) {
      Counts na = ra, nb = rb;
      for (std::size_t t = 0; t < move.size(); ++t) {
        if (move[t] == 0) continue;
        if (ra[t] != kInf && ra[t] < move[t]) return false;
        if (na[t] != kInf) na[t] -= move[t];
        if (nb[t] != kInf) nb[t] -= move[t];
      }
      return leq(nb, na, m);
    }
    std::uint64_t avail = rb[type];
    for (std::uint64_t k = 0; used + k <= cap && (avail == kInf || k <= avail); ++k) {
      move[type] = k;
      bool ok = forall_moves(ra, rb, m, move, type + 1, used + static_cast<unsigned>(k));
      move[type] = 0;
      if (!ok) return false;
    }
    return true;
  }
};

std::vector<UnaryType> type_universe(const UnaryTail& a, const UnaryTail& b) {
  std::set<UnaryType> s{a.tail, b.tail};
  for (auto [t, c] : a.exceptional) s.insert(t);
  for (auto [t, c] : b.exceptional) s.insert(t);
  return {s.begin(), s.end()};
}

Counts counts_of(const UnaryTail& u, const std::vector<UnaryType>& types, std::uint64_t threshold) {
  Counts c(types.size(), 0);
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (types[i] == u.tail) {
      c[i] = kInf;
      continue;
    }
    auto it = u.exceptional.find(types[i]);
    if (it != u.exceptional.end()) c[i] = it->second > threshold ? kInf : it->second;
  }
  return c;
}

void remove_tuple(Counts& c, const std::vector<UnaryType>& types, const std::vector<UnaryType>& tuple) {
  for (auto t : tuple) {
    auto i = static_cast<std::size_t>(std::lower_bound(types.begin(), types.end(), t) - types.begin());
    if (i == types.size() || types[i] != t || c[i] == 0)
      throw std::invalid_argument("tuple type not realized often enough in the structure");
    if (c[i] != kInf) --c[i];
  }
}

}  // namespace

bool leq_n_unary_pointed(const StructureDescriptor& a, const std::vector<UnaryType>& a_tuple,
                         const StructureDescriptor& b, const std::vector<UnaryType>& b_tuple, unsigned n,
                         unsigned cap) {
  if (!a.is_unary() || !b.is_unary()) throw std::invalid_argument("leq_n_unary: unary descriptors required");
  if (!(a.vocab() == b.vocab())) throw std::invalid_argument("leq_n_unary: vocabulary mismatch");
  if (cap < 1) throw std::invalid_argument("leq_n_unary: cap must be >= 1");
  if (n >= 3) throw Unsupported("back-and-forth levels >= 3 on infinite structures");
  if (a_tuple.size() != b_tuple.size()) throw std::invalid_argument("tuple length mismatch");
  const auto& ua = a.as_unary();
  const auto& ub = b.as_unary();
  auto types = type_universe(ua, ub);
  std::uint64_t threshold = static_cast<std::uint64_t>(n) * cap + a_tuple.size();
  Counts ca = counts_of(ua, types, threshold);
  Counts cb = counts_of(ub, types, threshold);
  remove_tuple(ca, types, a_tuple);
  remove_tuple(cb, types, b_tuple);
  // Distinct elements; ≤0 holds iff the 1-type sequences agree.
  if (a_tuple != b_tuple) return false;
  UnaryGame g{cap, {}};
  return g.leq(ca, cb, n);
}

bool leq_n_unary(const StructureDescriptor& a, const StructureDescriptor& b, unsigned n, unsigned cap) {
  return leq_n_unary_pointed(a, {}, b, {}, n, cap);
}

// --- interval profiles -------------------------------------------------------------

bool leq1_intervals(const CardProfile& a, const CardProfile& b) {
  if (a.cards.size() != b.cards.size()) throw std::invalid_argument("leq1_intervals: length mismatch");
  for (std::size_t i = 0; i < a.cards.size(); ++i)
    if (a.cards[i] < b.cards[i]) return false;
  return true;
}

ProfileSet minimal_elements(const ProfileSet& s) {
  ProfileSet out;
  for (const auto& p : s) {
    bool dominated = false;
    for (const auto& q : s) {
      if (&p == &q || p == q) continue;
      if (leq1_intervals(p, q)) {  // q <= p componentwise, q != p
        dominated = true;
        break;
      }
    }
    if (!dominated) out.insert(p);
  }
  return out;
}

namespace {

using K = OrderExpr::Kind;

class Profiler {
 public:
  Profiler(unsigned cap, bool minimal) : cap_(cap), minimal_(minimal) {}

  ProfileSet of(const OrderExpr& e, unsigned k) {
    auto key = std::make_tuple(static_cast<const void*>(&e), std::size_t{0}, k);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    ProfileSet out = compute(e, k);
    if (minimal_) out = minimal_elements(out);
    memo_.emplace(key, out);
    return out;
  }

 private:
  Card c(Card x) const { return x.capped(cap_); }
  Card fin(std::uint64_t v) const { return Card(v).capped(cap_); }

  ProfileSet compute(const OrderExpr& e, unsigned k) {
    ProfileSet out;
    if (k == 0) {
      out.insert({{c(cardinality(e))}});
      return out;
    }
    switch (e.kind) {
      case K::Fin: finite_profiles(e.fin, k, out); break;
      case K::Omega:
        // k-1 free finite gaps, then the infinite tail.
        free_prefix(k, false, Card::infinite(), out, false);
        break;
      case K::OmegaStar: free_prefix(k, false, Card::infinite(), out, true); break;
      case K::BigW:
        // Limit points let any interval before the last be finite or infinite.
        free_prefix(k, true, Card::infinite(), out, false);
        break;
      case K::Zeta: {
        CardProfile base;
        base.cards.assign(k + 1, Card(0));
        base.cards[0] = Card::infinite();
        base.cards[k] = Card::infinite();
        enumerate_middle(base, 1, k, out);
        break;
      }
      case K::Eta: out.insert({std::vector<Card>(k + 1, Card::infinite())}); break;
      case K::Sum: out = sum_profiles(e, 0, k); break;
      case K::Prod: out = prod_profiles(e, k); break;
    }
    return out;
  }

  // Entries 0..k-1 range over {0..cap} (and ∞ if allow_inf), entry k = last.
  // mirrored puts the fixed entry first instead.
  void free_prefix(unsigned k, bool allow_inf, Card last, ProfileSet& out, bool mirrored) {
    std::vector<Card> values;
    for (unsigned v = 0; v <= cap_; ++v) values.push_back(Card(v));
    if (allow_inf) values.push_back(Card::infinite());
    if (minimal_) values = {values.front()};
    std::vector<Card> cur(k + 1, Card(0));
    std::function<void(unsigned)> rec = [&](unsigned i) {
      if (i == k) {
        CardProfile p;
        if (mirrored) {
          p.cards.push_back(last);
          p.cards.insert(p.cards.end(), cur.begin(), cur.begin() + k);
        } else {
          p.cards.assign(cur.begin(), cur.begin() + k);
          p.cards.push_back(last);
        }
        out.insert(std::move(p));
        return;
      }
      for (auto v : values) {
        cur[i] = v;
        rec(i + 1);
      }
    };
    rec(0);
  }

  void enumerate_middle(CardProfile& p, unsigned i, unsigned k, ProfileSet& out) {
    if (i >= k) {
      out.insert(p);
      return;
    }
    unsigned top = minimal_ ? 0 : cap_;
    for (unsigned v = 0; v <= top; ++v) {
      p.cards[i] = Card(v);
      enumerate_middle(p, i + 1, k, out);
    }
  }

  // Capped gap vectors g_0..g_k of Fin(n) with k marked points.
  void finite_profiles(std::uint64_t n, unsigned k, ProfileSet& out) {
    if (n < k) return;
    const std::uint64_t total = n - k;
    std::vector<Card> cur(k + 1, Card(0));
    std::function<void(unsigned, std::uint64_t, unsigned)> rec = [&](unsigned i, std::uint64_t exact,
                                                                    unsigned big) {
      if (exact + static_cast<std::uint64_t>(big) * cap_ > total) return;
      if (i == k + 1) {
        if ((big == 0 && exact == total) || (big > 0 && exact + static_cast<std::uint64_t>(big) * cap_ <= total))
          out.insert({cur});
        return;
      }
      for (unsigned v = 0; v <= cap_; ++v) {
        cur[i] = Card(v);
        if (v < cap_)
          rec(i + 1, exact + v, big);
        else
          rec(i + 1, exact, big + 1);
      }
    };
    rec(0, 0, 0);
  }

  static CardProfile merge(const CardProfile& a, const CardProfile& b, unsigned cap) {
    CardProfile p;
    p.cards.assign(a.cards.begin(), a.cards.end() - 1);
    p.cards.push_back((a.cards.back() + b.cards.front()).capped(cap));
    p.cards.insert(p.cards.end(), b.cards.begin() + 1, b.cards.end());
    return p;
  }

  // Profiles of kids[start] + kids[start+1] + ... with k points.
  ProfileSet sum_profiles(const OrderExpr& e, std::size_t start, unsigned k) {
    if (start + 1 == e.kids.size()) return of(e.kids[start], k);
    auto key = std::make_tuple(static_cast<const void*>(&e), start + 1, k);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    ProfileSet out;
    for (unsigned k1 = 0; k1 <= k; ++k1) {
      auto left = of(e.kids[start], k1);
      if (left.empty()) continue;
      auto right = sum_profiles(e, start + 1, k - k1);
      for (const auto& l : left)
        for (const auto& r : right) out.insert(merge(l, r, cap_));
    }
    if (minimal_) out = minimal_elements(out);
    memo_.emplace(key, out);
    return out;
  }

  ProfileSet prod_profiles(const OrderExpr& e, unsigned k) {
    const auto& a = e.left();
    const auto& b = e.right();
    const Card size_a = cardinality(a);
    ProfileSet out;
    std::vector<unsigned> parts;
    // Compositions k = k_1 + ... + k_r, k_i >= 1, one block per used copy.
    std::function<void(unsigned)> compose = [&](unsigned left) {
      if (left == 0) {
        emit_prod(a, b, size_a, parts, out);
        return;
      }
      for (unsigned ki = 1; ki <= left; ++ki) {
        parts.push_back(ki);
        compose(left - ki);
        parts.pop_back();
      }
    };
    compose(k);
    return out;
  }

  void emit_prod(const OrderExpr& a, const OrderExpr& b, Card size_a, const std::vector<unsigned>& parts,
                 ProfileSet& out) {
    const unsigned r = static_cast<unsigned>(parts.size());
    auto copies = of(b, r);
    if (copies.empty()) return;
    std::vector<std::vector<CardProfile>> blocks;
    for (auto ki : parts) {
      auto s = of(a, ki);
      if (s.empty()) return;
      blocks.emplace_back(s.begin(), s.end());
    }
    std::vector<std::size_t> choice(r, 0);
    for (const auto& gb : copies) {
      std::fill(choice.begin(), choice.end(), 0);
      for (;;) {
        CardProfile p;
        Card carry = (gb.cards[0] * size_a).capped(cap_);
        for (unsigned i = 0; i < r; ++i) {
          const auto& blk = blocks[i][choice[i]].cards;
          p.cards.push_back((carry + blk.front()).capped(cap_));
          for (std::size_t j = 1; j + 1 < blk.size(); ++j) p.cards.push_back(blk[j]);
          carry = (blk.back() + (gb.cards[i + 1] * size_a)).capped(cap_);
          if (blk.size() == 1) {
            // Block with a single interval cannot happen: k_i >= 1 gives >= 2.
            throw std::logic_error("profile block without marked point");
          }
        }
        p.cards.push_back(carry);
        out.insert(std::move(p));
        std::size_t i = 0;
        while (i < r && ++choice[i] == blocks[i].size()) choice[i++] = 0;
        if (i == r) break;
      }
    }
  }

  unsigned cap_;
  bool minimal_;
  std::map<std::tuple<const void*, std::size_t, unsigned>, ProfileSet> memo_;
};

}  // namespace

ProfileSet interval_profiles(const OrderExpr& e, unsigned points, unsigned cap) {
  return Profiler(cap, false).of(e, points);
}

ProfileSet minimal_profiles(const OrderExpr& e, unsigned points, unsigned cap) {
  return Profiler(cap, true).of(e, points);
}

bool leq2_order(const OrderExpr& a, const OrderExpr& b, unsigned cap) {
  if (cap < 2) throw std::invalid_argument("leq2_order: cap must be >= 2");
  Profiler pa(cap, true), pb(cap, true);
  for (unsigned p = 0; p <= cap; ++p) {
    auto qs = pb.of(b, p);
    if (qs.empty()) continue;
    auto rs = pa.of(a, p);
    for (const auto& q : qs) {
      bool answered = std::any_of(rs.begin(), rs.end(), [&](const CardProfile& r) { return leq1_intervals(q, r); });
      if (!answered) return false;
    }
  }
  return true;
}

bool leq_n_described(const StructureDescriptor& a, const StructureDescriptor& b, unsigned n, BfConfig cfg) {
  if (a.is_unary() != b.is_unary()) throw std::invalid_argument("cross-variant comparison");
  if (n >= 3) throw Unsupported("back-and-forth levels >= 3 on infinite structures");
  if (a.is_unary()) return leq_n_unary(a, b, n, cfg.cap);
  const auto& ea = a.as_order().expr;
  const auto& eb = b.as_order().expr;
  if (n == 0) return true;
  if (n == 1) return cardinality(ea) >= cardinality(eb);
  return leq2_order(ea, eb, cfg.cap);
}

bool equiv2_described(const StructureDescriptor& a, const StructureDescriptor& b, BfConfig cfg) {
  return leq_n_described(a, b, 2, cfg) && leq_n_described(b, a, 2, cfg);
}

// --- Π_n oracle ------------------------------------------------------------------

namespace {

// Atomic type of a tuple as a bit string: equalities x_i = x_j (i < j), then
// each relation over every argument tuple in lexicographic order.
std::uint64_t atomic_type(const Board& s, const Tuple& t) {
  std::uint64_t code = 0;
  unsigned bit = 0;
  auto push = [&](bool v) {
    if (bit >= 64) throw std::invalid_argument("pi_n_oracle: bounds exceeded (atomic type > 64 bits)");
    if (v) code |= std::uint64_t{1} << bit;
    ++bit;
  };
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) push(t[i] == t[j]);
  std::uint32_t buf[16];
  for (std::size_t r = 0; r < s.relations(); ++r) {
    const auto arity = s.arity(r);
    for_position_tuples(t.size(), arity, kNoPos, [&](const std::vector<std::size_t>& pos) {
      for (std::uint32_t k = 0; k < arity; ++k) buf[k] = t[pos[k]];
      push(s.holds(r, buf));
      return true;
    });
  }
  return code;
}

template <class F>
void for_all_tuples(std::uint32_t size, std::size_t len, F&& f) {
  Tuple t(len, 0);
  if (len > 0 && size == 0) return;
  for (;;) {
    f(t);
    std::size_t i = 0;
    while (i < len && ++t[i] == size) t[i++] = 0;
    if (i == len) return;
  }
}

bool subset(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TheoryProfile theory_profile(const Snapshot& s, unsigned n, unsigned var_bound) {
  if (n > 2) throw std::invalid_argument("pi_n_oracle: n must be 0, 1 or 2");
  if (s.size() > 4 || var_bound > 4) throw std::invalid_argument("pi_n_oracle: bounds exceeded");
  Board b(s);
  TheoryProfile tp;
  tp.n = n;
  tp.var_bound = var_bound;
  if (n == 0) return tp;
  tp.families.resize(var_bound + 1);
  for (unsigned p = 0; p <= var_bound; ++p) {
    const unsigned q = (n == 1) ? 0 : var_bound - p;
    std::set<std::vector<std::uint64_t>> fam;
    for_all_tuples(s.size(), p, [&](const Tuple& x) {
      std::set<std::uint64_t> types;
      for_all_tuples(s.size(), q, [&](const Tuple& y) {
        Tuple xy = x;
        xy.insert(xy.end(), y.begin(), y.end());
        types.insert(atomic_type(b, xy));
      });
      fam.insert({types.begin(), types.end()});
    });
    if (n == 1) {
      // Realized p-types, as one set.
      std::set<std::uint64_t> all;
      for (const auto& f : fam) all.insert(f.begin(), f.end());
      tp.families[p] = {{all.begin(), all.end()}};
    } else {
      tp.families[p].assign(fam.begin(), fam.end());
    }
  }
  return tp;
}

bool pi_included(const TheoryProfile& a, const TheoryProfile& b) {
  if (a.n != b.n || a.var_bound != b.var_bound) throw std::invalid_argument("pi_included: profile shapes differ");
  if (a.n == 0) return true;
  for (unsigned p = 0; p <= a.var_bound; ++p) {
    if (a.n == 1) {
      // ∀x̄ θ true in a is true in b for every θ iff types(b) ⊆ types(a).
      if (!subset(b.families[p][0], a.families[p][0])) return false;
      continue;
    }
    // Every S' of b must contain some S of a; otherwise θ = complement of S'
    // separates.
    for (const auto& sb : b.families[p]) {
      bool found = std::any_of(a.families[p].begin(), a.families[p].end(),
                               [&](const auto& sa) { return subset(sa, sb); });
      if (!found) return false;
    }
  }
  return true;
}

bool pi_n_oracle(const Snapshot& a, const Snapshot& b, unsigned n, unsigned var_bound) {
  if (!(a.vocab() == b.vocab())) throw std::invalid_argument("pi_n_oracle: vocabulary mismatch");
  return pi_included(theory_profile(a, n, var_bound), theory_profile(b, n, var_bound));
}

}  // namespace ulearn
