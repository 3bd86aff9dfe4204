#include "recagt/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace recagt {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

std::uint64_t Rng::next_u64() { return engine_(); }

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be nonzero");
  // Rejection sampling over the largest multiple of bound.
  const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit && limit != 0);
  return v % bound;
}

double Rng::unit() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::delay(double delta) {
  // 1 - unit() lies in (0, 1].
  return delta * (1.0 - unit());
}

Rng Rng::child(std::uint64_t tag) const {
  std::uint64_t s = seed_ ^ (tag * 0x9e3779b97f4a7c15ULL);
  return Rng(splitmix64(s));
}

std::vector<std::uint32_t> Rng::sample(std::uint32_t population, std::uint32_t k) {
  if (k > population) throw std::invalid_argument("Rng::sample: k exceeds population");
  std::vector<std::uint32_t> out;
  out.reserve(k);
  if (k == 0) return out;
  // Small draws: rejection against the already-chosen set.
  if (static_cast<std::uint64_t>(k) * 4 <= population) {
    while (out.size() < k) {
      auto v = static_cast<std::uint32_t>(below(population));
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    return out;
  }
  // Dense draws: partial Fisher-Yates.
  std::vector<std::uint32_t> idx(population);
  for (std::uint32_t i = 0; i < population; ++i) idx[i] = i;
  for (std::uint32_t i = 0; i < k; ++i) {
    auto j = i + static_cast<std::uint32_t>(below(population - i));
    std::swap(idx[i], idx[j]);
    out.push_back(idx[i]);
  }
  return out;
}

}  // namespace recagt
