#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ulearn/order_expr.hpp"

namespace ulearn {

// Input the engine cannot decide or realize (distinct CLI exit code).
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RelationSymbol {
  std::string name;
  std::uint32_t arity = 1;
  bool operator==(const RelationSymbol&) const = default;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<RelationSymbol> rels);

  const std::vector<RelationSymbol>& relations() const { return rels_; }
  std::size_t size() const { return rels_.size(); }
  const RelationSymbol& operator[](std::size_t i) const { return rels_[i]; }
  std::size_t index_of(const std::string& name) const;
  bool all_unary() const;

  bool operator==(const Vocabulary&) const = default;

 private:
  std::vector<RelationSymbol> rels_;
};

// The vocabulary of linear orders: one binary relation "lt".
const Vocabulary& order_vocabulary();
// Unary predicates named P0..P{n-1}, or "P" alone when n == 1.
Vocabulary unary_vocabulary(const std::vector<std::string>& names);

using Tuple = std::vector<std::uint32_t>;

// Read-only view of one relation: tuples as spans, in lexicographic order.
class RelationView {
 public:
  using Row = std::span<const std::uint32_t>;
  class iterator {
   public:
    using value_type = Row;
    using difference_type = std::ptrdiff_t;
    iterator() = default;
    iterator(const std::uint32_t* base, std::uint32_t arity, std::size_t i) : base_(base), arity_(arity), i_(i) {}
    Row operator*() const { return Row(base_ + i_ * arity_, arity_); }
    iterator& operator++() { ++i_; return *this; }
    iterator operator++(int) { auto c = *this; ++i_; return c; }
    bool operator==(const iterator& o) const { return i_ == o.i_; }

   private:
    const std::uint32_t* base_ = nullptr;
    std::uint32_t arity_ = 0;
    std::size_t i_ = 0;
  };

  RelationView(const std::uint32_t* base, std::uint32_t arity, std::size_t count)
      : base_(base), arity_(arity), count_(count) {}
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  Row operator[](std::size_t i) const { return Row(base_ + i * arity_, arity_); }
  iterator begin() const { return {base_, arity_, 0}; }
  iterator end() const { return {base_, arity_, count_}; }

 private:
  const std::uint32_t* base_;
  std::uint32_t arity_;
  std::size_t count_;
};

// Finite structure on {0, ..., size-1}.  Relations are sorted, duplicate-free
// tuple lists, one per vocabulary symbol.  Storage is flat and shared between
// copies.
class Snapshot {
 public:
  Snapshot(Vocabulary vocab, std::uint32_t size, std::vector<std::vector<Tuple>> relations);

  const Vocabulary& vocab() const { return vocab_; }
  std::uint32_t size() const { return size_; }
  RelationView relation(std::size_t i) const;
  std::vector<Tuple> tuples(std::size_t i) const;
  bool holds(std::size_t rel, const Tuple& t) const;

  // Substructure induced on {0, ..., k-1}.
  Snapshot induced(std::uint32_t k) const;
  // this->induced(prefix.size()) == prefix, without building it.
  bool extends(const Snapshot& prefix) const;

  bool operator==(const Snapshot& o) const;

 private:
  struct Rel {
    std::vector<std::uint32_t> data;
    std::size_t count = 0;
  };
  struct FlatTag {};
  Snapshot(FlatTag, Vocabulary vocab, std::uint32_t size, std::vector<Rel> rels);

  Vocabulary vocab_;
  std::uint32_t size_ = 0;
  std::shared_ptr<const std::vector<Rel>> rels_;
};

// Finite linear order 0 < 1 < ... < n-1.
Snapshot chain_snapshot(std::uint32_t n);

// A 1-type over an all-unary vocabulary: bit r set iff predicate r holds.
using UnaryType = std::uint32_t;

struct UnaryTail {
  Vocabulary vocab;
  std::map<UnaryType, std::uint64_t> exceptional;  // type -> count (>= 1)
  UnaryType tail = 0;
};

struct OrderType {
  OrderExpr expr;
};

// Finite description of a countably infinite structure.
class StructureDescriptor {
 public:
  static StructureDescriptor unary(UnaryTail u);
  static StructureDescriptor order(OrderExpr e);
  static StructureDescriptor order(std::string_view text) { return order(parse_expr(text)); }

  bool is_unary() const { return std::holds_alternative<UnaryTail>(v_); }
  bool is_order() const { return std::holds_alternative<OrderType>(v_); }
  const UnaryTail& as_unary() const { return std::get<UnaryTail>(v_); }
  const OrderType& as_order() const { return std::get<OrderType>(v_); }
  const Vocabulary& vocab() const;

 private:
  std::variant<UnaryTail, OrderType> v_;
};

// Presentation of a descriptor.  Seed 0 enumerates the abstract elements in
// canonical order.  Any other seed uses the window rule: at stage s the
// candidates are the kWindow smallest unused canonical elements, and the one
// at position splitmix64(seed, s) mod kWindow is revealed, except that a
// candidate which has waited kPatience stages at the front is revealed first.
// Every element therefore appears.
class PresentationStream {
 public:
  static constexpr std::size_t kWindow = 4;
  static constexpr std::size_t kPatience = 8;

  PresentationStream(StructureDescriptor d, std::uint64_t seed);

  const StructureDescriptor& descriptor() const { return d_; }
  std::uint64_t seed() const { return seed_; }

  // Canonical element index revealed at stages 0..s.
  std::vector<std::uint64_t> schedule(std::uint64_t s) const;

 private:
  StructureDescriptor d_;
  std::uint64_t seed_;
};

PresentationStream permuted_presentation(const StructureDescriptor& d, std::uint64_t seed);

// The finite substructure on {0, ..., s}.
Snapshot restrict(const PresentationStream& p, std::uint64_t s);

std::uint64_t splitmix64(std::uint64_t x);

bool iso_snapshots(const Snapshot& a, const Snapshot& b);
bool iso_described(const StructureDescriptor& a, const StructureDescriptor& b);

// Finite pattern with a constant or parity tail.  Parity means index n maps
// to base entry n mod 2.
struct FamilyPattern {
  std::vector<std::size_t> initial;
  enum class Tail { Constant, Parity } tail_kind = Tail::Constant;
  std::size_t tail_index = 0;
};

class Family {
 public:
  Family(std::vector<StructureDescriptor> base, FamilyPattern pattern);
  // Identity on the base, then constantly the last entry.
  static Family identity(std::vector<StructureDescriptor> base);
  // A1, A2, A1, A2, ...
  static Family parity(StructureDescriptor a1, StructureDescriptor a2);

  const std::vector<StructureDescriptor>& base() const { return base_; }
  const FamilyPattern& pattern() const { return pattern_; }
  std::size_t base_index(std::uint64_t n) const;
  const StructureDescriptor& member(std::uint64_t n) const { return base_[base_index(n)]; }

 private:
  std::vector<StructureDescriptor> base_;
  FamilyPattern pattern_;
};

}  // namespace ulearn
