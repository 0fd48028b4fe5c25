#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace ulearn {

// Cardinality in ℕ ∪ {∞}.
class Card {
 public:
  constexpr Card() = default;
  constexpr explicit Card(std::uint64_t n) : n_(n) {}
  static constexpr Card infinite() {
    Card c;
    c.inf_ = true;
    return c;
  }

  constexpr bool is_infinite() const { return inf_; }
  constexpr bool is_finite() const { return !inf_; }
  constexpr std::uint64_t value() const { return n_; }

  // Truncation used by interval profiles: finite values >= cap become cap.
  constexpr Card capped(std::uint64_t cap) const {
    if (inf_ || n_ < cap) return *this;
    return Card(cap);
  }

  friend constexpr Card operator+(Card a, Card b) {
    if (a.inf_ || b.inf_) return infinite();
    return Card(a.n_ + b.n_);
  }
  friend constexpr Card operator*(Card a, Card b) {
    if ((a.is_finite() && a.n_ == 0) || (b.is_finite() && b.n_ == 0)) return Card(0);
    if (a.inf_ || b.inf_) return infinite();
    return Card(a.n_ * b.n_);
  }

  friend constexpr bool operator==(Card, Card) = default;
  friend constexpr std::strong_ordering operator<=>(Card a, Card b) {
    if (a.inf_ != b.inf_) return a.inf_ ? std::strong_ordering::greater : std::strong_ordering::less;
    if (a.inf_) return std::strong_ordering::equal;
    return a.n_ <=> b.n_;
  }

  std::string str() const { return inf_ ? "inf" : std::to_string(n_); }

 private:
  std::uint64_t n_ = 0;
  bool inf_ = false;
};

}  // namespace ulearn
