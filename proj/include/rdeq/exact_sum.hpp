#pragma once

#include <array>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>

namespace rdeq {

/// Exact fixed-point accumulator for non-negative doubles.
///
/// Sums are exact, so the final rounded result does not depend on the order
/// in which values were added. This is what makes grid-cell accumulation
/// reproducible under sample permutation and arbitrary work partitioning.
///
/// Layout: limb i holds bits [64*i, 64*i+64) of the sum expressed in units
/// of 2^-1075 (the weight of the least significant denormal bit). Positive
/// doubles occupy bit positions [0, 2099); the remaining headroom absorbs
/// carries from ~2^76 additions, far beyond any realistic sample count.
class ExactAccumulator {
 public:
  void add(double v) {
    assert(v >= 0.0);
    if (v == 0.0) return;
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    const std::uint64_t exp_field = bits >> 52;
    assert(exp_field != 0x7ff);  // finite input only
    std::uint64_t mantissa = bits & ((std::uint64_t{1} << 52) - 1);
    std::uint64_t pos = exp_field;  // bit index of mantissa LSB
    if (exp_field != 0) {
      mantissa |= std::uint64_t{1} << 52;
    } else {
      pos = 1;  // denormals share the exponent of the smallest normal
    }
    const std::size_t limb = pos >> 6;
    const unsigned off = static_cast<unsigned>(pos & 63);
    const std::uint64_t lo = mantissa << off;
    const std::uint64_t hi = off == 0 ? 0 : (mantissa >> (64 - off));
    std::uint64_t carry = add_with_carry(limb, lo);
    carry += hi;
    for (std::size_t i = limb + 1; carry != 0; ++i) {
      assert(i < kLimbs);
      carry = add_with_carry(i, carry);
    }
  }

  /// Correctly rounded (nearest-even) value of the exact sum.
  double to_double() const {
    int top = static_cast<int>(kLimbs) - 1;
    while (top >= 0 && limbs_[top] == 0) --top;
    if (top < 0) return 0.0;

    const int lead = 63 - std::countl_zero(limbs_[top]);
    const long msb = 64L * top + lead;  // global index of the highest set bit

    // Collect the 55 bits below the MSB (52 mantissa + guard + margin) plus
    // a sticky flag for everything further down.
    std::uint64_t mant = 0;  // top 53 bits, MSB-aligned at bit 52
    std::uint64_t guard = 0;
    bool sticky = false;
    for (long k = 0; k <= 53; ++k) {
      const long idx = msb - k;
      const int bit = idx >= 0 ? bit_at(idx) : 0;
      if (k <= 52) {
        mant = (mant << 1) | static_cast<std::uint64_t>(bit);
      } else {
        guard = static_cast<std::uint64_t>(bit);
      }
    }
    for (long idx = msb - 54; idx >= 0; --idx) {
      if (bit_at(idx)) {
        sticky = true;
        break;
      }
    }
    // Round to nearest, ties to even.
    if (guard && (sticky || (mant & 1))) {
      ++mant;
      if (mant >> 53) {  // mantissa overflow: 2^53 -> renormalize
        mant >>= 1;
        return std::ldexp(static_cast<double>(mant), static_cast<int>(msb - 51 - 1075));
      }
    }
    return std::ldexp(static_cast<double>(mant), static_cast<int>(msb - 52 - 1075));
  }

 private:
  static constexpr std::size_t kLimbs = 34;  // 2176 bits

  std::uint64_t add_with_carry(std::size_t i, std::uint64_t v) {
    const std::uint64_t old = limbs_[i];
    limbs_[i] = old + v;
    return limbs_[i] < old ? 1 : 0;
  }

  int bit_at(long idx) const {
    const std::size_t limb = static_cast<std::size_t>(idx) >> 6;
    const unsigned off = static_cast<unsigned>(idx & 63);
    return static_cast<int>((limbs_[limb] >> off) & 1);
  }

  std::array<std::uint64_t, kLimbs> limbs_{};
};

}  // namespace rdeq
