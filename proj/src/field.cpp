#include "recagt/field.hpp"

namespace recagt {

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) r = mulmod_u64(r, base, m);
    base = mulmod_u64(base, base, m);
    exp >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL,
                          23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // This witness set is exact for every n < 2^64.
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL,
                          23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

Field::Field(std::uint64_t modulus, unsigned bytes_per_element)
    : q_(modulus), bpe_(bytes_per_element), mersenne_(modulus == kMersenne61) {
  if (!is_prime_u64(q_)) throw InvalidParams("field modulus is not prime");
  if (q_ >= (std::uint64_t{1} << 63))
    throw InvalidParams("field modulus must be below 2^63");
  if (bpe_ > 7) throw InvalidParams("bytes_per_element must be at most 7");
  if (bpe_ > 0 && (std::uint64_t{1} << (8 * bpe_)) > q_)
    throw InvalidParams("2^(8*bytes_per_element) must not exceed the modulus");
}

Field Field::mersenne61() { return Field(kMersenne61, 7); }

FieldElement Field::pow(FieldElement base, std::uint64_t exp) const {
  FieldElement r = one();
  FieldElement b = base;
  while (exp > 0) {
    if (exp & 1) r = mul(r, b);
    b = mul(b, b);
    exp >>= 1;
  }
  return r;
}

FieldElement Field::inv(FieldElement a) const {
  if (a.value == 0) throw ZeroInverse("inverse of zero field element");
  // Extended Euclid on (a, q); q prime so gcd is 1.
  std::int64_t t = 0, new_t = 1;
  std::uint64_t r = q_, new_r = a.value;
  while (new_r != 0) {
    std::uint64_t quot = r / new_r;
    std::int64_t tmp_t = t - static_cast<std::int64_t>(quot) * new_t;
    t = new_t;
    new_t = tmp_t;
    std::uint64_t tmp_r = r - quot * new_r;
    r = new_r;
    new_r = tmp_r;
  }
  return {t < 0 ? static_cast<std::uint64_t>(t + static_cast<std::int64_t>(q_))
                : static_cast<std::uint64_t>(t)};
}

std::vector<FieldElement> Field::pack_bytes(std::span<const std::uint8_t> data) const {
  if (bpe_ == 0) {
    if (!data.empty())
      throw InvalidParams("field has bytes_per_element = 0 and cannot pack data");
    return {};
  }
  std::vector<FieldElement> out;
  out.reserve((data.size() + bpe_ - 1) / bpe_);
  for (std::size_t off = 0; off < data.size(); off += bpe_) {
    std::uint64_t v = 0;
    for (unsigned k = 0; k < bpe_; ++k) {
      v <<= 8;
      if (off + k < data.size()) v |= data[off + k];
    }
    out.push_back({v});
  }
  return out;
}

Bytes Field::unpack_bytes(std::span<const FieldElement> elems,
                          std::uint64_t byte_length) const {
  if (byte_length == 0) return {};
  if (bpe_ == 0)
    throw InvalidParams("field has bytes_per_element = 0 and cannot unpack data");
  const std::uint64_t needed = (byte_length + bpe_ - 1) / bpe_;
  if (needed > elems.size())
    throw LengthOverflow("stored byte length exceeds packed element capacity");
  const std::uint64_t cap = std::uint64_t{1} << (8 * bpe_);
  Bytes out;
  out.reserve(byte_length);
  for (std::uint64_t i = 0; i < needed; ++i) {
    if (elems[i].value >= cap)
      throw LengthOverflow("packed element exceeds payload range");
    for (unsigned k = 0; k < bpe_ && out.size() < byte_length; ++k) {
      out.push_back(static_cast<std::uint8_t>(
          (elems[i].value >> (8 * (bpe_ - 1 - k))) & 0xff));
    }
  }
  return out;
}

}  // namespace recagt
