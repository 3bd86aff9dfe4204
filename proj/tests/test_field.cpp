#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "recagt/field.hpp"
#include "recagt/rng.hpp"

using namespace recagt;

TEST_CASE("hand-checked arithmetic at q=11") {
  Field f(11, 0);
  CHECK(f.add({8}, {5}) == FieldElement{2});
  CHECK(f.mul({8}, {7}) == FieldElement{1});  // 56 mod 11
  CHECK(f.sub({3}, {5}) == FieldElement{9});
  CHECK(f.add({7}, {0}) == FieldElement{7});
  CHECK(f.inv({2}) == FieldElement{6});  // 2*6 = 12 = 1 mod 11
  CHECK(f.inv({1}) == FieldElement{1});
  CHECK_THROWS_AS(f.inv({0}), ZeroInverse);
}

TEST_CASE("modulus validation") {
  CHECK_THROWS_AS(Field(10, 0), InvalidParams);
  CHECK_THROWS_AS(Field(1, 0), InvalidParams);
  CHECK_THROWS_AS(Field(11, 1), InvalidParams);   // 2^8 > 11
  CHECK_NOTHROW(Field(257, 1));                   // 2^8 <= 257
  CHECK_NOTHROW(Field::mersenne61());
  CHECK(Field::mersenne61().bytes_per_element() == 7);
  CHECK(is_prime_u64(Field::kMersenne61));
  CHECK_FALSE(is_prime_u64((std::uint64_t{1} << 61) + 1));
}

TEST_CASE("field axioms hold for sampled triples") {
  Rng rng(2024);
  for (const Field& f : {Field(11, 0), Field(257, 1), Field::mersenne61()}) {
    const std::uint64_t q = f.modulus();
    for (int iter = 0; iter < 2000; ++iter) {
      FieldElement a = f.from_u64(rng.below(q));
      FieldElement b = f.from_u64(rng.below(q));
      FieldElement c = f.from_u64(rng.below(q));
      CHECK(f.add(a, b) == f.add(b, a));
      CHECK(f.mul(a, b) == f.mul(b, a));
      CHECK(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)));
      CHECK(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
      CHECK(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
      CHECK(f.add(a, f.neg(a)) == f.zero());
      CHECK(f.sub(f.add(a, b), b) == a);
      if (a.value != 0) {
        CHECK(f.mul(a, f.inv(a)) == f.one());
      }
    }
  }
}

TEST_CASE("pow matches repeated multiplication") {
  Field f(257, 1);
  for (std::uint64_t base : {0ULL, 1ULL, 2ULL, 97ULL, 256ULL}) {
    FieldElement acc = f.one();
    for (std::uint64_t e = 0; e < 20; ++e) {
      CHECK(f.pow({base}, e) == acc);
      acc = f.mul(acc, {base});
    }
  }
}

TEST_CASE("packing basics") {
  Field f257(257, 1);
  CHECK(f257.pack_bytes({}).empty());
  const std::uint8_t one_byte[] = {0x07};
  auto packed = f257.pack_bytes(one_byte);
  REQUIRE(packed.size() == 1);
  CHECK(packed[0] == FieldElement{7});
  CHECK(f257.unpack_bytes(packed, 1) == Bytes{0x07});
  CHECK(f257.unpack_bytes({}, 0).empty());
}

TEST_CASE("pack/unpack round-trips random blobs") {
  Field f = Field::mersenne61();
  Rng rng(7);
  for (std::size_t len : {0u, 1u, 6u, 7u, 8u, 1024u, 4097u}) {
    Bytes blob(len);
    for (auto& b : blob) b = static_cast<std::uint8_t>(rng.below(256));
    auto packed = f.pack_bytes(blob);
    CHECK(packed.size() == (len + 6) / 7);
    CHECK(f.unpack_bytes(packed, len) == blob);
  }
}

TEST_CASE("unpack rejects inconsistent lengths") {
  Field f = Field::mersenne61();
  Bytes blob(10, 0xab);
  auto packed = f.pack_bytes(blob);
  CHECK_THROWS_AS(f.unpack_bytes(packed, 15), LengthOverflow);
  // Elements outside the payload range cannot be honest packings.
  std::vector<FieldElement> bad = {FieldElement{std::uint64_t{1} << 60}};
  CHECK_THROWS_AS(f.unpack_bytes(bad, 7), LengthOverflow);
}

TEST_CASE("zero-bpe fields refuse data") {
  Field f(11, 0);
  CHECK(f.pack_bytes({}).empty());
  Bytes blob(3, 1);
  CHECK_THROWS_AS(f.pack_bytes(blob), InvalidParams);
}
