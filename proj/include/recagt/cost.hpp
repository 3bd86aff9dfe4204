#pragma once

#include <cstdint>
#include <string>

#include "recagt/common.hpp"

namespace recagt {

/// Cost-model parameters. Defaults mirror the experiment configuration:
/// 16-byte checksum digests (MD5), 128-byte secret keys, 1-byte scalars and
/// 256-byte signatures.
struct CostParams {
  std::uint64_t b = std::uint64_t{1} << 20;  // shard size in bytes
  std::uint32_t n = 6;                       // committee size
  std::uint32_t m = 2;                       // shard-coding size
  std::uint32_t w = 1;                       // scalar bytes
  std::uint32_t z = 256;                     // signature bytes
  std::uint32_t s = 128;                     // secret key bytes
  std::uint32_t d = 16;                      // checksum digest bytes
};

struct SchemeCost {
  std::string scheme;
  std::uint64_t communication_bytes = 0;
  std::string complexity_class;
};

/// Every member ships the full shard: n * b.
SchemeCost cost_uncoded(const CostParams& cp);

/// One member ships the shard, the rest ship digests: b + d * (n - 1).
SchemeCost cost_checksum(const CostParams& cp);

/// Credential issuance plus m+1 coded shard messages plus m+1 identity
/// proofs: (w + z + s) + (m+1) * ceil(b/m) + (m+1) * (w + 2z).
SchemeCost cost_recagt(const CostParams& cp);

}  // namespace recagt
