#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "recagt/common.hpp"

namespace recagt {

/// Element of the prime field F_q. Kept reduced: value < q at all times.
struct FieldElement {
  std::uint64_t value = 0;
  friend bool operator==(const FieldElement&, const FieldElement&) = default;
};

/// Prime-field arithmetic and byte<->element packing.
///
/// The modulus is checked for primality at construction (deterministic
/// Miller-Rabin, exact for 64-bit inputs). Packing stores bytes_per_element
/// payload bytes big-endian per element, which requires 2^(8*bpe) <= q;
/// bpe = 0 disables packing (hand-checkable test fields like q = 11).
///
/// All operations are pure functions on reduced values; instances are
/// freely shareable across threads.
class Field {
public:
  Field(std::uint64_t modulus, unsigned bytes_per_element);

  /// Production default: q = 2^61 - 1, 7 payload bytes per element.
  static Field mersenne61();

  std::uint64_t modulus() const { return q_; }
  unsigned bytes_per_element() const { return bpe_; }

  FieldElement from_u64(std::uint64_t v) const { return {v % q_}; }
  FieldElement zero() const { return {0}; }
  FieldElement one() const { return {q_ > 1 ? 1u : 0u}; }

  FieldElement add(FieldElement a, FieldElement b) const {
    std::uint64_t s = a.value + b.value;  // q < 2^63 so no overflow
    if (s >= q_) s -= q_;
    return {s};
  }

  FieldElement sub(FieldElement a, FieldElement b) const {
    return {a.value >= b.value ? a.value - b.value : a.value + q_ - b.value};
  }

  FieldElement neg(FieldElement a) const { return {a.value == 0 ? 0 : q_ - a.value}; }

  FieldElement mul(FieldElement a, FieldElement b) const {
    if (mersenne_) {
      unsigned __int128 t = static_cast<unsigned __int128>(a.value) * b.value;
      std::uint64_t r = static_cast<std::uint64_t>(t & kMersenne61) +
                        static_cast<std::uint64_t>(t >> 61);
      r = (r & kMersenne61) + (r >> 61);
      if (r >= kMersenne61) r -= kMersenne61;
      return {r};
    }
    return {static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(a.value) * b.value % q_)};
  }

  FieldElement pow(FieldElement base, std::uint64_t exp) const;

  /// Multiplicative inverse. Throws ZeroInverse on a = 0.
  FieldElement inv(FieldElement a) const;

  /// Pack bytes into elements, bytes_per_element per element, big-endian,
  /// zero-padding the final partial chunk. Lossless together with the
  /// original byte length (see unpack_bytes).
  std::vector<FieldElement> pack_bytes(std::span<const std::uint8_t> data) const;

  /// Inverse of pack_bytes. byte_length must satisfy
  /// ceil(byte_length / bpe) <= elems.size(); throws LengthOverflow otherwise.
  Bytes unpack_bytes(std::span<const FieldElement> elems, std::uint64_t byte_length) const;

  static constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

private:
  std::uint64_t q_;
  unsigned bpe_;
  bool mersenne_;
};

/// Deterministic Miller-Rabin primality test, exact for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n);

}  // namespace recagt
