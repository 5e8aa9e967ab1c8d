#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace techdebt {

// A single die face, 1..6.
class Digit {
 public:
  constexpr Digit() = default;
  constexpr explicit Digit(int value) : value_(static_cast<std::uint8_t>(value)) {
    if (value < 1 || value > 6) throw std::out_of_range("digit must be in 1..6, got " + std::to_string(value));
  }

  constexpr int value() const { return value_; }
  friend constexpr auto operator<=>(Digit, Digit) = default;

  static constexpr std::array<int, 6> all() { return {1, 2, 3, 4, 5, 6}; }

 private:
  std::uint8_t value_ = 1;
};

// Set of die faces stored as a 6-bit mask (bit d-1 for face d).
class DigitSet {
 public:
  constexpr DigitSet() = default;
  constexpr DigitSet(std::initializer_list<int> digits) {
    for (int d : digits) insert(Digit(d));
  }

  static constexpr DigitSet from_mask(std::uint8_t mask) {
    DigitSet s;
    s.bits_ = mask & kFull;
    return s;
  }
  static constexpr DigitSet full() { return from_mask(kFull); }

  constexpr std::uint8_t mask() const { return bits_; }
  constexpr bool contains(Digit d) const { return bits_ & bit(d); }
  constexpr bool contains(int d) const { return d >= 1 && d <= 6 && (bits_ & (1u << (d - 1))); }
  constexpr void insert(Digit d) { bits_ |= bit(d); }
  constexpr void erase(Digit d) { bits_ &= static_cast<std::uint8_t>(~bit(d)); }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }

  constexpr DigitSet operator|(DigitSet o) const { return from_mask(bits_ | o.bits_); }
  constexpr DigitSet operator&(DigitSet o) const { return from_mask(bits_ & o.bits_); }
  constexpr DigitSet& operator|=(DigitSet o) {
    bits_ |= o.bits_;
    return *this;
  }
  constexpr bool is_subset_of(DigitSet o) const { return (bits_ & ~o.bits_) == 0; }
  friend constexpr bool operator==(DigitSet, DigitSet) = default;

  std::vector<Digit> members() const {
    std::vector<Digit> out;
    for (int d : Digit::all())
      if (contains(d)) out.emplace_back(d);
    return out;
  }

 private:
  static constexpr std::uint8_t kFull = 0x3F;
  static constexpr std::uint8_t bit(Digit d) { return static_cast<std::uint8_t>(1u << (d.value() - 1)); }
  std::uint8_t bits_ = 0;
};

struct DiceRoll {
  Digit first;
  Digit second;

  constexpr bool is_double() const { return first == second; }
  constexpr int high() const { return std::max(first.value(), second.value()); }
  friend constexpr bool operator==(const DiceRoll&, const DiceRoll&) = default;
};

inline std::string to_string(DigitSet s) {
  std::string out = "{";
  for (Digit d : s.members()) {
    if (out.size() > 1) out += ',';
    out += std::to_string(d.value());
  }
  return out + "}";
}

}  // namespace techdebt
