#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "recagt/field.hpp"

namespace recagt {

/// Original committee data split into m equal-length sub-shard vectors.
struct Shard {
  std::vector<std::vector<FieldElement>> subshards;  // m rows, each length L
  std::uint64_t original_byte_length = 0;

  std::uint32_t sub_count() const { return static_cast<std::uint32_t>(subshards.size()); }
  std::size_t length() const { return subshards.empty() ? 0 : subshards.front().size(); }
};

/// One node's coded data: the shard polynomial evaluated at its scalar x,
/// coordinate by coordinate.
struct CodedShard {
  FieldElement x;
  std::vector<FieldElement> values;  // length L
};

struct GroupMember {
  std::uint32_t node_id = 0;
  FieldElement scalar;
};

/// A parity-test group of exactly m+1 members with pairwise-distinct scalars.
struct TestGroup {
  std::vector<GroupMember> members;
};

/// Last-row weights of the inverse (m+1)x(m+1) Vandermonde matrix on the
/// group scalars: weights[j] = 1 / prod_{k != j} (x_j - x_k). They satisfy
/// sum_j w_j x_j^p = 0 for p in [0, m-1] and sum_j w_j x_j^m = 1.
struct ParityVector {
  std::vector<FieldElement> weights;
};

enum class Verdict { Honest, Positive };

struct TestOutcome {
  std::vector<FieldElement> output;  // length L
  Verdict verdict = Verdict::Honest;
};

/// Split a byte string into m sub-shards of packed field elements, zero-padded
/// so all sub-shards have equal length.
Shard shard_from_bytes(std::span<const std::uint8_t> data, std::uint32_t m,
                       const Field& field);

/// Evaluate the shard polynomial f(x) = sum_v subshards[v] * x^v at x.
CodedShard encode(const Shard& shard, FieldElement x, const Field& field);

/// Compute the parity weights for a group. Throws DuplicateScalar if two
/// members share a scalar.
ParityVector parity_vector(const TestGroup& group, const Field& field);

/// Apply the parity weights to the group's coded values. Honest verdict iff
/// every output coordinate is zero. coded must be aligned with group order.
TestOutcome run_test(const TestGroup& group, const std::vector<CodedShard>& coded,
                     const ParityVector& pv, const Field& field);

/// Recover the original shard from exactly m coded shards with distinct
/// scalars (Lagrange interpolation, coefficients read off per coordinate).
/// The result's original_byte_length is the full packed capacity.
Shard decode(const std::vector<CodedShard>& subset, const Field& field);

/// Same, but record the byte length the shard originally carried.
Shard decode(const std::vector<CodedShard>& subset, const Field& field,
             std::uint64_t original_byte_length);

/// Unpack a shard back to its original byte string.
Bytes decode_to_bytes(const Shard& shard, const Field& field);

}  // namespace recagt
