#include "ulearn/core.hpp"

#include <algorithm>
#include <compare>
#include <numeric>
#include <set>
#include <utility>

namespace ulearn {

// --- vocabulary ------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<RelationSymbol> rels) : rels_(std::move(rels)) {
  if (rels_.empty()) throw std::invalid_argument("vocabulary must be nonempty");
  std::set<std::string> seen;
  for (const auto& r : rels_) {
    if (r.arity < 1) throw std::invalid_argument("relation '" + r.name + "' has arity 0");
    if (!seen.insert(r.name).second) throw std::invalid_argument("duplicate relation '" + r.name + "'");
  }
}

std::size_t Vocabulary::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < rels_.size(); ++i)
    if (rels_[i].name == name) return i;
  throw std::invalid_argument("unknown relation '" + name + "'");
}

bool Vocabulary::all_unary() const {
  return std::all_of(rels_.begin(), rels_.end(), [](const auto& r) { return r.arity == 1; });
}

const Vocabulary& order_vocabulary() {
  static const Vocabulary v({{"lt", 2}});
  return v;
}

Vocabulary unary_vocabulary(const std::vector<std::string>& names) {
  std::vector<RelationSymbol> rels;
  for (const auto& n : names) rels.push_back({n, 1});
  return Vocabulary(std::move(rels));
}

// --- snapshots -------------------------------------------------------------

Snapshot::Snapshot(Vocabulary vocab, std::uint32_t size, std::vector<std::vector<Tuple>> relations)
    : vocab_(std::move(vocab)), size_(size) {
  if (relations.size() != vocab_.size()) throw std::invalid_argument("relation count does not match vocabulary");
  std::vector<Rel> rels(relations.size());
  for (std::size_t i = 0; i < relations.size(); ++i) {
    auto& ts = relations[i];
    for (const auto& t : ts) {
      if (t.size() != vocab_[i].arity)
        throw std::invalid_argument("tuple of wrong arity in relation '" + vocab_[i].name + "'");
      for (auto x : t)
        if (x >= size_) throw std::invalid_argument("tuple entry outside the domain");
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    rels[i].count = ts.size();
    rels[i].data.reserve(ts.size() * vocab_[i].arity);
    for (const auto& t : ts) rels[i].data.insert(rels[i].data.end(), t.begin(), t.end());
  }
  rels_ = std::make_shared<const std::vector<Rel>>(std::move(rels));
}

Snapshot::Snapshot(FlatTag, Vocabulary vocab, std::uint32_t size, std::vector<Rel> rels)
    : vocab_(std::move(vocab)), size_(size), rels_(std::make_shared<const std::vector<Rel>>(std::move(rels))) {}

RelationView Snapshot::relation(std::size_t i) const {
  const auto& r = (*rels_)[i];
  return RelationView(r.data.data(), vocab_[i].arity, r.count);
}

std::vector<Tuple> Snapshot::tuples(std::size_t i) const {
  std::vector<Tuple> out;
  for (auto t : relation(i)) out.emplace_back(t.begin(), t.end());
  return out;
}

bool Snapshot::holds(std::size_t rel, const Tuple& t) const {
  auto v = relation(rel);
  if (t.size() != vocab_[rel].arity) return false;
  std::size_t lo = 0, hi = v.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    auto row = v[mid];
    if (std::lexicographical_compare(row.begin(), row.end(), t.begin(), t.end())) lo = mid + 1;
    else hi = mid;
  }
  return lo < v.size() && std::equal(t.begin(), t.end(), v[lo].begin());
}

Snapshot Snapshot::induced(std::uint32_t k) const {
  k = std::min(k, size_);
  if (k == size_) return *this;
  std::vector<Rel> rels(rels_->size());
  for (std::size_t i = 0; i < rels.size(); ++i)
    for (auto t : relation(i))
      if (std::all_of(t.begin(), t.end(), [k](auto x) { return x < k; })) {
        rels[i].data.insert(rels[i].data.end(), t.begin(), t.end());
        ++rels[i].count;
      }
  return Snapshot(FlatTag{}, vocab_, k, std::move(rels));
}

bool Snapshot::extends(const Snapshot& prefix) const {
  if (prefix.size_ > size_ || !(prefix.vocab_ == vocab_)) return false;
  if (rels_ == prefix.rels_) return prefix.size_ == size_;
  const auto k = prefix.size_;
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    auto mine = relation(i);
    auto theirs = prefix.relation(i);
    std::size_t j = 0;
    for (auto t : mine) {
      if (!std::all_of(t.begin(), t.end(), [k](auto x) { return x < k; })) continue;
      if (j == theirs.size() || !std::equal(t.begin(), t.end(), theirs[j].begin())) return false;
      ++j;
    }
    if (j != theirs.size()) return false;
  }
  return true;
}

bool Snapshot::operator==(const Snapshot& o) const {
  if (size_ != o.size_ || !(vocab_ == o.vocab_)) return false;
  if (rels_ == o.rels_) return true;
  for (std::size_t i = 0; i < rels_->size(); ++i)
    if ((*rels_)[i].count != (*o.rels_)[i].count || (*rels_)[i].data != (*o.rels_)[i].data) return false;
  return true;
}

Snapshot chain_snapshot(std::uint32_t n) {
  std::vector<Tuple> lt;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j) lt.push_back({i, j});
  return Snapshot(order_vocabulary(), n, {std::move(lt)});
}

// --- descriptors -----------------------------------------------------------

StructureDescriptor StructureDescriptor::unary(UnaryTail u) {
  if (!u.vocab.all_unary()) throw std::invalid_argument("unary descriptor needs an all-unary vocabulary");
  if (u.vocab.size() > 32) throw Unsupported("more than 32 unary predicates");
  UnaryType mask = u.vocab.size() == 32 ? ~UnaryType{0} : ((UnaryType{1} << u.vocab.size()) - 1);
  if (u.tail & ~mask) throw std::invalid_argument("tail type mentions unknown predicates");
  for (auto [t, c] : u.exceptional) {
    if (t & ~mask) throw std::invalid_argument("exceptional type mentions unknown predicates");
    if (c < 1) throw std::invalid_argument("exceptional counts must be >= 1");
  }
  StructureDescriptor d;
  d.v_ = std::move(u);
  return d;
}

StructureDescriptor StructureDescriptor::order(OrderExpr e) {
  if (cardinality(e).is_finite())
    throw std::invalid_argument("order descriptor must denote an infinite order: " + to_string(e));
  StructureDescriptor d;
  d.v_ = OrderType{std::move(e)};
  return d;
}

const Vocabulary& StructureDescriptor::vocab() const {
  if (is_unary()) return as_unary().vocab;
  return order_vocabulary();
}

// --- order elements ----------------------------------------------------------
//
// An element of the order denoted by an expression is a coordinate vector
// read along the expression: Sum contributes the summand index, Prod(a, b)
// contributes the b-coordinates followed by the a-coordinates, Eta
// contributes (numerator, exponent) of a dyadic rational in (0,1), every
// other atom one integer.

namespace {

using Coords = std::vector<std::int64_t>;

std::strong_ordering compare_at(const OrderExpr& e, const Coords& x, const Coords& y, std::size_t& i) {
  using K = OrderExpr::Kind;
  switch (e.kind) {
    case K::Fin:
    case K::Omega:
    case K::Zeta: {
      auto c = x[i] <=> y[i];
      ++i;
      return c;
    }
    case K::OmegaStar: {
      auto c = y[i] <=> x[i];
      ++i;
      return c;
    }
    case K::Eta: {
      std::int64_t nx = x[i], ex = x[i + 1], ny = y[i], ey = y[i + 1];
      i += 2;
      std::int64_t e_max = std::max(ex, ey);
      return (nx << (e_max - ex)) <=> (ny << (e_max - ey));
    }
    case K::BigW: throw Unsupported("W has no presentation");
    case K::Sum: {
      auto c = x[i] <=> y[i];
      if (c != 0) return c;
      std::size_t k = static_cast<std::size_t>(x[i]);
      ++i;
      return compare_at(e.kids[k], x, y, i);
    }
    case K::Prod: {
      auto c = compare_at(e.right(), x, y, i);
      if (c != 0) return c;
      return compare_at(e.left(), x, y, i);
    }
  }
  return std::strong_ordering::equal;
}

// First n elements (fewer if the order is finite) in canonical order.
// enumerate(e, n) is a prefix of enumerate(e, n + 1).
std::vector<Coords> enumerate(const OrderExpr& e, std::size_t n) {
  using K = OrderExpr::Kind;
  std::vector<Coords> out;
  switch (e.kind) {
    case K::Fin:
      for (std::uint64_t i = 0; i < e.fin && i < n; ++i) out.push_back({static_cast<std::int64_t>(i)});
      break;
    case K::Omega:
    case K::OmegaStar:
      for (std::size_t i = 0; i < n; ++i) out.push_back({static_cast<std::int64_t>(i)});
      break;
    case K::Zeta:
      // 0, 1, -1, 2, -2, ...
      for (std::size_t i = 0; i < n; ++i) {
        auto k = static_cast<std::int64_t>((i + 1) / 2);
        out.push_back({i % 2 == 1 ? k : -k});
      }
      break;
    case K::Eta:
      // 1/2, 1/4, 3/4, 1/8, 3/8, ...
      for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t k = i + 1;
        std::int64_t m = 63 - __builtin_clzll(k);
        std::int64_t j = static_cast<std::int64_t>(k - (std::uint64_t{1} << m));
        out.push_back({2 * j + 1, m + 1});
      }
      break;
    case K::BigW: throw Unsupported("W has no presentation");
    case K::Sum: {
      std::vector<std::vector<Coords>> parts;
      for (const auto& k : e.kids) parts.push_back(enumerate(k, n));
      for (std::size_t round = 0; out.size() < n; ++round) {
        bool any = false;
        for (std::size_t c = 0; c < parts.size() && out.size() < n; ++c) {
          if (round >= parts[c].size()) continue;
          any = true;
          Coords x{static_cast<std::int64_t>(c)};
          x.insert(x.end(), parts[c][round].begin(), parts[c][round].end());
          out.push_back(std::move(x));
        }
        if (!any) break;
      }
      break;
    }
    case K::Prod: {
      auto ea = enumerate(e.left(), n);
      auto eb = enumerate(e.right(), n);
      if (ea.empty() || eb.empty()) break;
      for (std::size_t d = 0; d + 2 <= ea.size() + eb.size() && out.size() < n; ++d) {
        for (std::size_t j = 0; j <= d && out.size() < n; ++j) {
          std::size_t ib = d - j, ia = j;
          if (ib >= eb.size() || ia >= ea.size()) continue;
          Coords x = eb[ib];
          x.insert(x.end(), ea[ia].begin(), ea[ia].end());
          out.push_back(std::move(x));
        }
      }
      break;
    }
  }
  return out;
}

void check_presentable(const OrderExpr& e) {
  if (contains_w(e)) throw Unsupported("W has no presentation: " + to_string(e));
}

}  // namespace

// --- presentations -------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

PresentationStream::PresentationStream(StructureDescriptor d, std::uint64_t seed)
    : d_(std::move(d)), seed_(seed) {
  if (d_.is_order()) check_presentable(d_.as_order().expr);
}

std::vector<std::uint64_t> PresentationStream::schedule(std::uint64_t s) const {
  std::vector<std::uint64_t> out;
  out.reserve(s + 1);
  if (seed_ == 0) {
    for (std::uint64_t i = 0; i <= s; ++i) out.push_back(i);
    return out;
  }
  // (element, stage at which it became the front of the pool)
  std::vector<std::uint64_t> pool;
  for (std::uint64_t i = 0; i < kWindow; ++i) pool.push_back(i);
  std::uint64_t next = kWindow;
  std::uint64_t front_since = 0;
  for (std::uint64_t stage = 0; stage <= s; ++stage) {
    std::size_t pick;
    if (stage - front_since >= kPatience) {
      pick = 0;
    } else {
      pick = static_cast<std::size_t>(splitmix64(seed_ ^ splitmix64(stage)) % kWindow);
    }
    out.push_back(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    pool.push_back(next++);
    if (pick == 0) front_since = stage + 1;
  }
  return out;
}

PresentationStream permuted_presentation(const StructureDescriptor& d, std::uint64_t seed) {
  return PresentationStream(d, seed);
}

Snapshot restrict(const PresentationStream& p, std::uint64_t s) {
  const auto sched = p.schedule(s);
  const auto n = static_cast<std::uint32_t>(s + 1);
  const auto& d = p.descriptor();
  if (d.is_unary()) {
    const auto& u = d.as_unary();
    std::vector<UnaryType> canon;
    for (auto [t, c] : u.exceptional) {
      if (t == u.tail) continue;  // absorbed into the tail
      for (std::uint64_t k = 0; k < c; ++k) canon.push_back(t);
    }
    std::vector<std::vector<Tuple>> rels(u.vocab.size());
    for (std::uint32_t x = 0; x < n; ++x) {
      UnaryType t = sched[x] < canon.size() ? canon[sched[x]] : u.tail;
      for (std::size_t r = 0; r < rels.size(); ++r)
        if (t >> r & 1u) rels[r].push_back({x});
    }
    return Snapshot(u.vocab, n, std::move(rels));
  }
  const auto& e = d.as_order().expr;
  std::uint64_t need = *std::max_element(sched.begin(), sched.end()) + 1;
  auto elems = enumerate(e, need);
  std::vector<Tuple> lt;
  for (std::uint32_t x = 0; x < n; ++x)
    for (std::uint32_t y = 0; y < n; ++y) {
      if (x == y) continue;
      std::size_t i = 0;
      if (compare_at(e, elems[sched[x]], elems[sched[y]], i) < 0) lt.push_back({x, y});
    }
  return Snapshot(order_vocabulary(), n, {std::move(lt)});
}

// --- isomorphism -----------------------------------------------------------------

namespace {

bool extend_iso(const Snapshot& a, const Snapshot& b, std::vector<std::uint32_t>& map,
                std::vector<bool>& used, std::uint32_t next) {
  if (next == a.size()) {
    for (std::size_t r = 0; r < a.vocab().size(); ++r)
      for (const auto& t : a.relation(r)) {
        Tuple img;
        for (auto x : t) img.push_back(map[x]);
        if (!b.holds(r, img)) return false;
      }
    return true;  // relation sizes agree, so the map is onto each relation
  }
  for (std::uint32_t y = 0; y < b.size(); ++y) {
    if (used[y]) continue;
    map[next] = y;
    // Partial check on tuples within {0..next}.
    bool ok = true;
    for (std::size_t r = 0; r < a.vocab().size() && ok; ++r) {
      const auto arity = a.vocab()[r].arity;
      // Tuples over {0..next} that mention next: compare a-truth with b-truth.
      Tuple t(arity, 0);
      std::uint64_t total = 1;
      for (std::uint32_t k = 0; k < arity; ++k) total *= (next + 1);
      for (std::uint64_t code = 0; code < total && ok; ++code) {
        std::uint64_t c = code;
        bool mentions = false;
        for (std::uint32_t k = 0; k < arity; ++k) {
          t[k] = static_cast<std::uint32_t>(c % (next + 1));
          c /= (next + 1);
          mentions = mentions || t[k] == next;
        }
        if (!mentions) continue;
        Tuple img;
        for (auto x : t) img.push_back(map[x]);
        ok = a.holds(r, t) == b.holds(r, img);
      }
    }
    if (!ok) continue;
    used[y] = true;
    if (extend_iso(a, b, map, used, next + 1)) return true;
    used[y] = false;
  }
  return false;
}

}  // namespace

bool iso_snapshots(const Snapshot& a, const Snapshot& b) {
  if (!(a.vocab() == b.vocab())) throw std::invalid_argument("iso_snapshots: vocabulary mismatch");
  if (a.size() != b.size()) return false;
  for (std::size_t r = 0; r < a.vocab().size(); ++r)
    if (a.relation(r).size() != b.relation(r).size()) return false;
  std::vector<std::uint32_t> map(a.size());
  std::vector<bool> used(b.size(), false);
  return extend_iso(a, b, map, used, 0);
}

bool iso_described(const StructureDescriptor& a, const StructureDescriptor& b) {
  if (a.is_unary() != b.is_unary()) throw std::invalid_argument("iso_described: cross-variant comparison");
  if (!(a.vocab() == b.vocab())) throw std::invalid_argument("iso_described: vocabulary mismatch");
  if (a.is_order()) return expr_equal(a.as_order().expr, b.as_order().expr);
  const auto& ua = a.as_unary();
  const auto& ub = b.as_unary();
  if (ua.tail != ub.tail) return false;
  auto fold = [](const UnaryTail& u) {
    auto m = u.exceptional;
    m.erase(u.tail);
    return m;
  };
  return fold(ua) == fold(ub);
}

// --- families --------------------------------------------------------------------

Family::Family(std::vector<StructureDescriptor> base, FamilyPattern pattern)
    : base_(std::move(base)), pattern_(std::move(pattern)) {
  if (base_.empty()) throw std::invalid_argument("family base must be nonempty");
  for (auto i : pattern_.initial)
    if (i >= base_.size()) throw std::invalid_argument("pattern index outside the base");
  if (pattern_.tail_kind == FamilyPattern::Tail::Constant && pattern_.tail_index >= base_.size())
    throw std::invalid_argument("pattern tail outside the base");
  if (pattern_.tail_kind == FamilyPattern::Tail::Parity && base_.size() < 2)
    throw std::invalid_argument("parity pattern needs two base entries");
  const auto& v = base_.front().vocab();
  for (const auto& d : base_)
    if (d.is_unary() != base_.front().is_unary() || !(d.vocab() == v))
      throw std::invalid_argument("family members must share variant and vocabulary");
}

Family Family::identity(std::vector<StructureDescriptor> base) {
  FamilyPattern p;
  p.initial.resize(base.size());
  std::iota(p.initial.begin(), p.initial.end(), std::size_t{0});
  p.tail_index = base.empty() ? 0 : base.size() - 1;
  return Family(std::move(base), std::move(p));
}

Family Family::parity(StructureDescriptor a1, StructureDescriptor a2) {
  FamilyPattern p;
  p.tail_kind = FamilyPattern::Tail::Parity;
  return Family({std::move(a1), std::move(a2)}, std::move(p));
}

std::size_t Family::base_index(std::uint64_t n) const {
  if (n < pattern_.initial.size()) return pattern_.initial[n];
  if (pattern_.tail_kind == FamilyPattern::Tail::Parity) return static_cast<std::size_t>(n % 2);
  return pattern_.tail_index;
}

}  // namespace ulearn
