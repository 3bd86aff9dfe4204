#include "recagt/codes.hpp"

#include <algorithm>

namespace recagt {

Shard shard_from_bytes(std::span<const std::uint8_t> data, std::uint32_t m,
                       const Field& field) {
  if (m == 0) throw InvalidParams("sub-shard count must be at least 1");
  std::vector<FieldElement> elems = field.pack_bytes(data);
  const std::size_t per = elems.empty() ? 1 : (elems.size() + m - 1) / m;
  elems.resize(per * m, FieldElement{0});

  Shard shard;
  shard.original_byte_length = data.size();
  shard.subshards.reserve(m);
  for (std::uint32_t v = 0; v < m; ++v) {
    shard.subshards.emplace_back(elems.begin() + static_cast<std::ptrdiff_t>(v * per),
                                 elems.begin() + static_cast<std::ptrdiff_t>((v + 1) * per));
  }
  return shard;
}

CodedShard encode(const Shard& shard, FieldElement x, const Field& field) {
  const std::uint32_t m = shard.sub_count();
  if (m == 0) throw InvalidParams("cannot encode an empty shard");
  const std::size_t len = shard.length();
  for (const auto& sub : shard.subshards)
    if (sub.size() != len) throw ShapeMismatch("sub-shards have unequal lengths");

  CodedShard out;
  out.x = x;
  out.values.resize(len);
  for (std::size_t l = 0; l < len; ++l) {
    // Horner evaluation from the highest-order sub-shard down.
    FieldElement acc = shard.subshards[m - 1][l];
    for (std::uint32_t v = m - 1; v-- > 0;) {
      acc = field.add(field.mul(acc, x), shard.subshards[v][l]);
    }
    out.values[l] = acc;
  }
  return out;
}

namespace {

void check_distinct_scalars(const std::vector<FieldElement>& xs) {
  std::vector<std::uint64_t> seen;
  seen.reserve(xs.size());
  for (auto x : xs) seen.push_back(x.value);
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw DuplicateScalar("two members share an evaluation scalar");
}

}  // namespace

ParityVector parity_vector(const TestGroup& group, const Field& field) {
  const std::size_t u = group.members.size();
  if (u < 2) throw InvalidParams("a test group needs at least 2 members");
  std::vector<FieldElement> xs;
  xs.reserve(u);
  for (const auto& mem : group.members) xs.push_back(mem.scalar);
  check_distinct_scalars(xs);

  ParityVector pv;
  pv.weights.reserve(u);
  for (std::size_t j = 0; j < u; ++j) {
    FieldElement prod = field.one();
    for (std::size_t k = 0; k < u; ++k) {
      if (k == j) continue;
      prod = field.mul(prod, field.sub(xs[j], xs[k]));
    }
    pv.weights.push_back(field.inv(prod));
  }
  return pv;
}

TestOutcome run_test(const TestGroup& group, const std::vector<CodedShard>& coded,
                     const ParityVector& pv, const Field& field) {
  const std::size_t u = group.members.size();
  if (coded.size() != u || pv.weights.size() != u)
    throw ShapeMismatch("group, coded shards and parity weights must align");
  for (std::size_t j = 0; j < u; ++j) {
    if (!(coded[j].x == group.members[j].scalar))
      throw ShapeMismatch("coded shard scalar does not match group order");
  }
  const std::size_t len = coded.empty() ? 0 : coded.front().values.size();
  for (const auto& c : coded)
    if (c.values.size() != len) throw ShapeMismatch("coded value vectors have unequal lengths");

  TestOutcome out;
  out.output.resize(len, field.zero());
  out.verdict = Verdict::Honest;
  for (std::size_t l = 0; l < len; ++l) {
    FieldElement acc = field.zero();
    for (std::size_t j = 0; j < u; ++j) {
      acc = field.add(acc, field.mul(pv.weights[j], coded[j].values[l]));
    }
    out.output[l] = acc;
    if (acc.value != 0) out.verdict = Verdict::Positive;
  }
  return out;
}

Shard decode(const std::vector<CodedShard>& subset, const Field& field) {
  const std::size_t m = subset.size();
  if (m == 0) throw InvalidParams("decode needs at least one coded shard");
  std::vector<FieldElement> xs;
  xs.reserve(m);
  for (const auto& c : subset) xs.push_back(c.x);
  check_distinct_scalars(xs);
  const std::size_t len = subset.front().values.size();
  for (const auto& c : subset)
    if (c.values.size() != len) throw ShapeMismatch("coded value vectors have unequal lengths");

  // Coefficients of the full product poly N(x) = prod_j (x - x_j), degree m.
  std::vector<FieldElement> full(m + 1, field.zero());
  full[0] = field.one();
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t d = j + 2; d-- > 0;) {
      FieldElement shifted = (d > 0) ? full[d - 1] : field.zero();
      full[d] = field.sub(shifted, field.mul(full[d], xs[j]));
    }
  }

  // basis[j][v] = coefficient of x^v in the Lagrange basis poly L_j; obtained
  // by synthetic division of N(x) by (x - x_j) and scaling by the weight
  // 1 / prod_{k != j}(x_j - x_k).
  std::vector<std::vector<FieldElement>> basis(m, std::vector<FieldElement>(m));
  for (std::size_t j = 0; j < m; ++j) {
    FieldElement denom = field.one();
    for (std::size_t k = 0; k < m; ++k) {
      if (k != j) denom = field.mul(denom, field.sub(xs[j], xs[k]));
    }
    FieldElement w = field.inv(denom);
    // Synthetic division: N(x) / (x - x_j), top coefficient first.
    FieldElement carry = full[m];
    for (std::size_t d = m; d-- > 0;) {
      basis[j][d] = field.mul(carry, w);
      carry = field.add(full[d], field.mul(carry, xs[j]));
    }
  }

  Shard shard;
  shard.subshards.assign(m, std::vector<FieldElement>(len, field.zero()));
  for (std::size_t l = 0; l < len; ++l) {
    for (std::size_t j = 0; j < m; ++j) {
      const FieldElement y = subset[j].values[l];
      if (y.value == 0) continue;
      for (std::size_t v = 0; v < m; ++v) {
        shard.subshards[v][l] =
            field.add(shard.subshards[v][l], field.mul(basis[j][v], y));
      }
    }
  }
  shard.original_byte_length =
      static_cast<std::uint64_t>(m) * len * field.bytes_per_element();
  return shard;
}

Shard decode(const std::vector<CodedShard>& subset, const Field& field,
             std::uint64_t original_byte_length) {
  Shard shard = decode(subset, field);
  const std::uint64_t cap = static_cast<std::uint64_t>(shard.sub_count()) *
                            shard.length() * field.bytes_per_element();
  if (original_byte_length > cap)
    throw LengthOverflow("original byte length exceeds decoded capacity");
  shard.original_byte_length = original_byte_length;
  return shard;
}

Bytes decode_to_bytes(const Shard& shard, const Field& field) {
  const std::uint64_t cap = static_cast<std::uint64_t>(shard.sub_count()) *
                            shard.length() * field.bytes_per_element();
  if (shard.original_byte_length > cap)
    throw LengthOverflow("stored byte length inconsistent with shard capacity");
  std::vector<FieldElement> elems;
  elems.reserve(shard.sub_count() * shard.length());
  for (const auto& sub : shard.subshards) elems.insert(elems.end(), sub.begin(), sub.end());
  return field.unpack_bytes(elems, shard.original_byte_length);
}

}  // namespace recagt
