#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "recagt/codes.hpp"
#include "recagt/common.hpp"

namespace recagt {

/// Committee-level group testing parameters. f is the assumed upper bound on
/// the number of malicious nodes; validity requires n >= m + f + 1.
struct GtConfig {
  std::uint32_t n = 0;
  std::uint32_t m = 0;
  std::uint32_t f = 0;
  double rho = 0.01;
  std::uint64_t seed = 0;
};

void validate(const GtConfig& cfg);

/// Exact rational value, reduced. Numerators stay within __int128 for every
/// committee size this library targets (checked at runtime).
struct Rational {
  __int128 num = 0;
  __int128 den = 1;
  double to_double() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Probability that a uniformly drawn test group of size m+1 contains none of
/// the f malicious nodes: prod_{i=0}^{m} (1 - f/(n-i)).
double prob_no_malicious(std::uint32_t n, std::uint32_t f, std::uint32_t m);

/// Same quantity evaluated exactly in rational arithmetic.
Rational prob_no_malicious_exact(std::uint32_t n, std::uint32_t f, std::uint32_t m);

/// Trial budget guaranteeing a first all-honest group except with probability
/// rho: ceil(log(rho) / log(1 - p0)); 1 when p0 = 1.
std::uint64_t trials_to_first_honest(double p0, double rho);

/// Un-ceiled total trial bound: log_{1-P}(rho) + 2*sqrt((n-m-1)*f).
/// Degenerates to 1 when f = 0 (the first group is surely honest and no
/// retests are needed).
double total_trials_bound(std::uint32_t n, std::uint32_t m, std::uint32_t f, double rho);

/// Split `remaining` into ceil(sqrt(|remaining|*f)) subgroups of near-equal
/// size (never empty), preserving input order. Requires f >= 1.
std::vector<std::vector<std::uint32_t>> dorfman_partition(
    const std::vector<std::uint32_t>& remaining, std::uint32_t f);

/// Boolean group test oracle over node-id sets. Each completed test bumps the
/// trial counter exactly once; tests aborted by ExcludedNodesSignal do not
/// count.
class TestOracle {
public:
  virtual ~TestOracle() = default;

  Verdict run(const std::vector<std::uint32_t>& nodes) {
    Verdict v = do_test(nodes);
    ++trials_;
    return v;
  }

  std::uint64_t trials() const { return trials_; }

protected:
  virtual Verdict do_test(const std::vector<std::uint32_t>& nodes) = 0;

private:
  std::uint64_t trials_ = 0;
};

/// Why a node was removed from the testing pool by protocol-level checks
/// rather than by a code test.
enum class ExclusionReason { Timeout, FraudProven, ResendLimit };

/// Thrown by an oracle when protocol-level checks disqualify nodes before the
/// group's code test could run. The driver removes them from the pool and
/// re-draws; no trial is consumed.
struct ExcludedNodesSignal {
  std::vector<std::pair<std::uint32_t, ExclusionReason>> nodes;
};

enum class TrialStage { FirstHonest, Subgroup, Retest };

struct TrialRecord {
  TrialStage stage;
  std::vector<std::uint32_t> group;
  Verdict outcome;
};

struct IdentificationResult {
  std::set<std::uint32_t> honest_set;
  std::set<std::uint32_t> malicious_set;
  std::uint64_t trials_used = 0;
  std::uint64_t stage_a_trials = 0;
  std::vector<TrialRecord> stage_trace;
  std::vector<std::pair<std::uint32_t, ExclusionReason>> excluded;
  bool f_exceeded = false;  // more positives found than the assumed f
};

struct IdentifyOptions {
  /// With a noiseless oracle a positive subgroup must contain at least one
  /// individually positive member; assert that and throw OracleInconsistent
  /// on violation.
  bool assert_noiseless = true;
};

/// Two-stage adaptive identification. Stage A samples uniformly random
/// (m+1)-groups until one tests honest, aborting with StageAFailed after the
/// rho trial budget. Stage B partitions the remaining nodes Dorfman-style,
/// tests each subgroup padded to size m+1 with known-honest nodes, and
/// retests members of positive subgroups individually against m known-honest
/// nodes.
IdentificationResult identify_malicious(const GtConfig& cfg, TestOracle& oracle,
                                        const IdentifyOptions& opts = {});

/// Monte Carlo estimate of prob_no_malicious: fraction of `draws` uniform
/// (m+1)-subsets of [0,n) that avoid the f planted ids [0,f).
double mc_prob_no_malicious(std::uint32_t n, std::uint32_t f, std::uint32_t m,
                            std::uint64_t draws, std::uint64_t seed);

}  // namespace recagt
