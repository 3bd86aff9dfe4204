#include "recagt/grouptest.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "recagt/rng.hpp"

namespace recagt {

void validate(const GtConfig& cfg) {
  if (cfg.m == 0) throw InvalidConfig("shard-coding size m must be at least 1");
  if (cfg.n < static_cast<std::uint64_t>(cfg.m) + cfg.f + 1)
    throw InvalidConfig("committee must satisfy n >= m + f + 1");
  if (!(cfg.rho > 0.0 && cfg.rho < 1.0)) throw InvalidConfig("rho must lie in (0, 1)");
}

double Rational::to_double() const {
  return static_cast<double>(num) / static_cast<double>(den);
}

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

void check_group_args(std::uint32_t n, std::uint32_t f, std::uint32_t m) {
  if (m == 0) throw InvalidConfig("shard-coding size m must be at least 1");
  if (n < static_cast<std::uint64_t>(m) + f + 1)
    throw InvalidConfig("committee must satisfy n >= m + f + 1");
}

}  // namespace

double prob_no_malicious(std::uint32_t n, std::uint32_t f, std::uint32_t m) {
  check_group_args(n, f, m);
  double p = 1.0;
  for (std::uint32_t i = 0; i <= m; ++i) {
    p *= 1.0 - static_cast<double>(f) / static_cast<double>(n - i);
  }
  return p;
}

Rational prob_no_malicious_exact(std::uint32_t n, std::uint32_t f, std::uint32_t m) {
  check_group_args(n, f, m);
  Rational r{1, 1};
  for (std::uint32_t i = 0; i <= m; ++i) {
    const __int128 num = static_cast<__int128>(n) - f - i;
    const __int128 den = static_cast<__int128>(n) - i;
    constexpr __int128 kGuard = static_cast<__int128>(1) << 120;
    if (r.num > kGuard / (num > 0 ? num : 1) || r.den > kGuard / den)
      throw InvalidConfig("rational evaluation would overflow");
    r.num *= num;
    r.den *= den;
    __int128 g = gcd128(r.num, r.den);
    if (g > 1) {
      r.num /= g;
      r.den /= g;
    }
  }
  return r;
}

std::uint64_t trials_to_first_honest(double p0, double rho) {
  if (!(p0 > 0.0 && p0 <= 1.0)) throw InvalidConfig("p0 must lie in (0, 1]");
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidConfig("rho must lie in (0, 1)");
  if (p0 == 1.0) return 1;
  const double t = std::log(rho) / std::log(1.0 - p0);
  return static_cast<std::uint64_t>(std::ceil(t));
}

double total_trials_bound(std::uint32_t n, std::uint32_t m, std::uint32_t f, double rho) {
  check_group_args(n, f, m);
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidConfig("rho must lie in (0, 1)");
  if (f == 0) return 1.0;
  const double p0 = prob_no_malicious(n, f, m);
  const double first = std::log(rho) / std::log(1.0 - p0);
  const double remaining = static_cast<double>(n - m - 1);
  return first + 2.0 * std::sqrt(remaining * static_cast<double>(f));
}

std::vector<std::vector<std::uint32_t>> dorfman_partition(
    const std::vector<std::uint32_t>& remaining, std::uint32_t f) {
  if (f < 1) throw InvalidConfig("dorfman partition needs f >= 1");
  if (remaining.empty()) throw InvalidConfig("dorfman partition needs a nonempty pool");
  const auto count = static_cast<double>(remaining.size());
  auto groups = static_cast<std::size_t>(
      std::ceil(std::sqrt(count * static_cast<double>(f))));
  groups = std::clamp<std::size_t>(groups, 1, remaining.size());

  // Near-equal split: the first (size mod groups) subgroups get one extra.
  std::vector<std::vector<std::uint32_t>> out;
  out.reserve(groups);
  const std::size_t base = remaining.size() / groups;
  const std::size_t extra = remaining.size() % groups;
  std::size_t off = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t sz = base + (g < extra ? 1 : 0);
    out.emplace_back(remaining.begin() + static_cast<std::ptrdiff_t>(off),
                     remaining.begin() + static_cast<std::ptrdiff_t>(off + sz));
    off += sz;
  }
  return out;
}

namespace {

/// Bookkeeping for the identification driver: active pool plus exclusions.
class Pool {
public:
  explicit Pool(std::uint32_t n) {
    active_.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) active_.push_back(i);
  }

  const std::vector<std::uint32_t>& active() const { return active_; }

  void exclude(const std::vector<std::pair<std::uint32_t, ExclusionReason>>& nodes,
               IdentificationResult& result) {
    for (const auto& [id, reason] : nodes) {
      auto it = std::find(active_.begin(), active_.end(), id);
      if (it == active_.end())
        throw OracleInconsistent("oracle excluded a node outside the active pool");
      active_.erase(it);
      result.excluded.emplace_back(id, reason);
      result.malicious_set.insert(id);
    }
  }

  void remove(std::uint32_t id) {
    active_.erase(std::remove(active_.begin(), active_.end(), id), active_.end());
  }

private:
  std::vector<std::uint32_t> active_;
};

std::vector<std::uint32_t> pick_from(const std::vector<std::uint32_t>& pool,
                                     std::uint32_t k, Rng& rng) {
  auto idx = rng.sample(static_cast<std::uint32_t>(pool.size()), k);
  std::vector<std::uint32_t> out;
  out.reserve(k);
  for (auto i : idx) out.push_back(pool[i]);
  return out;
}

}  // namespace

IdentificationResult identify_malicious(const GtConfig& cfg, TestOracle& oracle,
                                        const IdentifyOptions& opts) {
  validate(cfg);
  Rng rng = Rng(cfg.seed).child(0x67726f7570ULL);  // group-sampling stream

  IdentificationResult result;
  Pool pool(cfg.n);

  const double p0 = prob_no_malicious(cfg.n, cfg.f, cfg.m);
  const std::uint64_t budget = trials_to_first_honest(p0, cfg.rho);

  // Helper that runs one oracle test, absorbing protocol-level exclusions.
  // Returns the verdict, or nullopt when the group was invalidated and must
  // be re-formed by the caller.
  auto tested = [&](const std::vector<std::uint32_t>& group,
                    TrialStage stage) -> std::optional<Verdict> {
    try {
      Verdict v = oracle.run(group);
      result.stage_trace.push_back({stage, group, v});
      return v;
    } catch (const ExcludedNodesSignal& sig) {
      pool.exclude(sig.nodes, result);
      return std::nullopt;
    }
  };

  // Stage A: uniform random groups until the first honest one.
  std::vector<std::uint32_t> first_group;
  std::uint64_t attempts = 0;
  while (true) {
    if (attempts >= budget)
      throw StageAFailed("no all-honest group found within the trial budget");
    if (pool.active().size() < cfg.m + 1)
      throw OracleInconsistent("active pool shrank below group size");
    auto group = pick_from(pool.active(), cfg.m + 1, rng);
    auto v = tested(group, TrialStage::FirstHonest);
    if (!v) continue;  // exclusions consumed no trial; re-draw
    ++attempts;
    if (*v == Verdict::Honest) {
      first_group = group;
      break;
    }
  }
  result.stage_a_trials = attempts;
  for (auto id : first_group) result.honest_set.insert(id);

  // Stage B: Dorfman partition of the untested nodes, padded subgroup tests,
  // then individual retests inside positive subgroups.
  std::vector<std::uint32_t> remaining;
  for (auto id : pool.active()) {
    if (!result.honest_set.count(id)) remaining.push_back(id);
  }

  auto padding = [&](std::size_t want, const std::vector<std::uint32_t>& avoid) {
    std::vector<std::uint32_t> pad;
    for (auto id : result.honest_set) {
      if (pad.size() == want) break;
      if (std::find(avoid.begin(), avoid.end(), id) == avoid.end()) pad.push_back(id);
    }
    if (pad.size() != want)
      throw OracleInconsistent("not enough known-honest nodes for padding");
    return pad;
  };

  std::vector<std::vector<std::uint32_t>> queue;
  if (!remaining.empty()) {
    const std::uint32_t f_eff = std::max<std::uint32_t>(cfg.f, 1);
    for (auto& sg : dorfman_partition(remaining, f_eff)) {
      // A code test holds at most m+1 members; split oversized subgroups.
      for (std::size_t off = 0; off < sg.size(); off += cfg.m + 1) {
        queue.emplace_back(sg.begin() + static_cast<std::ptrdiff_t>(off),
                           sg.begin() + static_cast<std::ptrdiff_t>(
                                            std::min(sg.size(), off + cfg.m + 1)));
      }
    }
  }

  std::vector<std::vector<std::uint32_t>> positive_subgroups;
  for (auto& subgroup : queue) {
    while (true) {
      // Drop members excluded meanwhile.
      std::erase_if(subgroup, [&](std::uint32_t id) {
        return std::find(pool.active().begin(), pool.active().end(), id) ==
               pool.active().end();
      });
      if (subgroup.empty()) break;
      auto group = subgroup;
      auto pad = padding(cfg.m + 1 - subgroup.size(), subgroup);
      group.insert(group.end(), pad.begin(), pad.end());
      auto v = tested(group, TrialStage::Subgroup);
      if (!v) continue;
      if (*v == Verdict::Honest) {
        for (auto id : subgroup) result.honest_set.insert(id);
      } else {
        positive_subgroups.push_back(subgroup);
      }
      break;
    }
  }

  for (auto& subgroup : positive_subgroups) {
    std::size_t positives_here = 0;
    for (auto id : subgroup) {
      bool resolved = false;
      while (!resolved) {
        if (std::find(pool.active().begin(), pool.active().end(), id) ==
            pool.active().end()) {
          // Excluded since the subgroup test; already in the malicious set.
          positives_here += result.malicious_set.count(id);
          break;
        }
        std::vector<std::uint32_t> group{id};
        auto pad = padding(cfg.m, group);
        group.insert(group.end(), pad.begin(), pad.end());
        auto v = tested(group, TrialStage::Retest);
        if (!v) continue;
        if (*v == Verdict::Positive) {
          result.malicious_set.insert(id);
          ++positives_here;
        } else {
          result.honest_set.insert(id);
        }
        resolved = true;
      }
    }
    if (opts.assert_noiseless && positives_here == 0)
      throw OracleInconsistent("positive subgroup with no positive member");
  }

  result.trials_used = oracle.trials();
  result.f_exceeded = result.malicious_set.size() > cfg.f;
  return result;
}

double mc_prob_no_malicious(std::uint32_t n, std::uint32_t f, std::uint32_t m,
                            std::uint64_t draws, std::uint64_t seed) {
  check_group_args(n, f, m);
  if (draws == 0) throw InvalidConfig("draw count must be positive");
  Rng rng = Rng(seed).child(0x6d63ULL);
  std::uint64_t clean = 0;
  for (std::uint64_t d = 0; d < draws; ++d) {
    auto group = rng.sample(n, m + 1);
    bool hit = false;
    for (auto id : group) {
      if (id < f) {
        hit = true;
        break;
      }
    }
    if (!hit) ++clean;
  }
  return static_cast<double>(clean) / static_cast<double>(draws);
}

}  // namespace recagt
