#include "recagt/cost.hpp"

namespace recagt {

namespace {

void check(const CostParams& cp) {
  if (cp.b == 0 || cp.n == 0 || cp.m == 0 || cp.w == 0 || cp.z == 0 || cp.s == 0 ||
      cp.d == 0)
    throw InvalidParams("cost parameters must all be positive");
}

}  // namespace

SchemeCost cost_uncoded(const CostParams& cp) {
  check(cp);
  return {"uncoded", cp.n * cp.b, "O(n^2 b)"};
}

SchemeCost cost_checksum(const CostParams& cp) {
  check(cp);
  return {"checksum", cp.b + std::uint64_t{cp.d} * (cp.n - 1), "O(n^2)"};
}

SchemeCost cost_recagt(const CostParams& cp) {
  check(cp);
  const std::uint64_t subshard = (cp.b + cp.m - 1) / cp.m;  // ceil(b/m)
  const std::uint64_t groups = std::uint64_t{cp.m} + 1;
  const std::uint64_t total = (cp.w + cp.z + std::uint64_t{cp.s}) + groups * subshard +
                              groups * (cp.w + 2ull * cp.z);
  return {"recagt", total, "O(log^2(m) loglog(m))"};
}

}  // namespace recagt
