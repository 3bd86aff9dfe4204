#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "recagt/simnet.hpp"

using namespace recagt;

namespace {

SimConfig small_cfg(std::uint32_t n, std::uint32_t m, std::uint32_t f,
                    std::vector<Behavior> behaviors, std::uint64_t seed) {
  SimConfig cfg;
  cfg.n = n;
  cfg.m = m;
  cfg.f = f;
  cfg.adversary_behaviors = std::move(behaviors);
  cfg.shard_bytes = 100;
  cfg.seed = seed;
  return cfg;
}

std::set<std::uint32_t> planted_set(const CommitteeState& st) {
  return {st.adversaries.begin(), st.adversaries.end()};
}

std::string transcript_text(const JoinTranscript& tx) {
  std::ostringstream out;
  write_transcript(tx, out);
  return out.str();
}

}  // namespace

TEST_CASE("committee construction places the configured adversaries") {
  SimConfig cfg = small_cfg(6, 2, 1, {Behavior::PerturbShard}, 42);
  CommitteeState st = build_committee(cfg);
  REQUIRE(st.adversaries.size() == 1);
  CHECK(st.behavior[st.adversaries[0]] == Behavior::PerturbShard);
  std::uint32_t honest = 0;
  for (auto b : st.behavior) honest += b == Behavior::Honest ? 1 : 0;
  CHECK(honest == 5);

  SimConfig all_honest = small_cfg(6, 2, 0, {}, 42);
  CommitteeState st2 = build_committee(all_honest);
  CHECK(st2.adversaries.empty());
  for (auto b : st2.behavior) CHECK(b == Behavior::Honest);

  SimConfig explicit_ids = small_cfg(8, 2, 2, {Behavior::Silent}, 1);
  explicit_ids.adversary_ids = {2, 5};
  CommitteeState st3 = build_committee(explicit_ids);
  CHECK(st3.adversaries == std::vector<std::uint32_t>{2, 5});
  CHECK(st3.behavior[2] == Behavior::Silent);
  CHECK(st3.behavior[5] == Behavior::Silent);
}

TEST_CASE("a perturbing node corrupts at least one stored coordinate") {
  SimConfig cfg = small_cfg(6, 2, 1, {Behavior::PerturbShard}, 7);
  CommitteeState st = build_committee(cfg);
  const std::uint32_t bad = st.adversaries[0];
  const Field field = cfg.field();
  CodedShard honest = encode(st.original_shard, st.identities[bad].scalar, field);
  CHECK(st.stored[bad].values != honest.values);
  for (std::uint32_t i = 0; i < cfg.n; ++i) {
    if (i == bad) continue;
    CodedShard expect = encode(st.original_shard, st.identities[i].scalar, field);
    CHECK(st.stored[i].values == expect.values);
  }
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(validate(small_cfg(4, 2, 4, {}, 0)), InvalidConfig);   // f >= n
  CHECK_THROWS_AS(validate(small_cfg(5, 2, 3, {}, 0)), InvalidConfig);   // n < m+f+1
  SimConfig bad_delta = small_cfg(6, 2, 1, {}, 0);
  bad_delta.delta = 0.0;
  CHECK_THROWS_AS(validate(bad_delta), InvalidConfig);
  SimConfig bad_ids = small_cfg(6, 2, 2, {}, 0);
  bad_ids.adversary_ids = {1, 6};
  CHECK_THROWS_AS(validate(bad_ids), InvalidConfig);
  SimConfig wrong_count = small_cfg(6, 2, 2, {}, 0);
  wrong_count.adversary_ids = {1};
  CHECK_THROWS_AS(validate(wrong_count), InvalidConfig);
}

TEST_CASE("perturbing adversary is identified and the shard recovered") {
  SimConfig cfg = small_cfg(6, 2, 1, {Behavior::PerturbShard}, 42);
  CommitteeState st = build_committee(cfg);
  JoinTranscript tx = run_join(cfg, st);
  CHECK(tx.result.malicious_set == planted_set(st));
  CHECK(tx.recovered_ok);
  CHECK(tx.fraud_proofs.empty());
  CHECK(tx.timeouts == 0);
  CHECK(tx.result.trials_used == tx.result.stage_trace.size());
  CHECK(tx.elapsed > 0.0);
}

TEST_CASE("all-honest committee needs stage A plus one sweep") {
  SimConfig cfg = small_cfg(6, 2, 0, {}, 9);
  CommitteeState st = build_committee(cfg);
  JoinTranscript tx = run_join(cfg, st);
  CHECK(tx.result.malicious_set.empty());
  CHECK(tx.result.honest_set.size() == 6);
  CHECK(tx.fraud_proofs.empty());
  CHECK(tx.result.stage_a_trials == 1);
  // Remaining 3 nodes fall into ceil(sqrt(3)) = 2 subgroups.
  CHECK(tx.result.trials_used == 3);
  CHECK(tx.recovered_ok);

  // Byte ledger: one credential message plus one shard message per member.
  const std::uint64_t L = st.stored[0].values.size();
  WireFormat wf = cfg.wire_format(*st.scheme);
  const std::uint64_t expect =
      (wf.scalar_bytes + wf.signature_bytes + 128) + 6 * wire_message_size(wf, L);
  CHECK(tx.total_bytes == expect);
}

TEST_CASE("scalar tampering yields exactly one adjudicated fraud proof") {
  SimConfig cfg = small_cfg(6, 2, 1, {Behavior::TamperScalar}, 17);
  CommitteeState st = build_committee(cfg);
  JoinTranscript tx = run_join(cfg, st);
  const std::uint32_t bad = st.adversaries[0];
  REQUIRE(tx.fraud_proofs.size() == 1);
  CHECK(tx.fraud_proofs[0].sender_id == bad);
  CHECK(tx.result.malicious_set == planted_set(st));
  REQUIRE(tx.result.excluded.size() == 1);
  CHECK(tx.result.excluded[0].second == ExclusionReason::FraudProven);
  CHECK(tx.recovered_ok);
  std::uint32_t fraud_verdicts = 0;
  for (const auto& [node, kind] : tx.verdicts)
    fraud_verdicts += (node == bad && kind == VerdictKind::FraudProof) ? 1 : 0;
  CHECK(fraud_verdicts == 1);
}

TEST_CASE("silent nodes time out and never reach the honest set") {
  SimConfig cfg = small_cfg(6, 2, 1, {Behavior::Silent}, 23);
  CommitteeState st = build_committee(cfg);
  JoinTranscript tx = run_join(cfg, st);
  const std::uint32_t bad = st.adversaries[0];
  CHECK(tx.timeouts == 1);
  CHECK(tx.result.malicious_set == planted_set(st));
  CHECK_FALSE(tx.result.honest_set.count(bad));
  REQUIRE(tx.result.excluded.size() == 1);
  CHECK(tx.result.excluded[0].second == ExclusionReason::Timeout);
  CHECK(tx.recovered_ok);
}

TEST_CASE("persistent bad counter-signatures exhaust the resend budget") {
  SimConfig cfg = small_cfg(6, 2, 1, {Behavior::BadSecondSignature}, 29);
  CommitteeState st = build_committee(cfg);
  JoinTranscript tx = run_join(cfg, st);
  const std::uint32_t bad = st.adversaries[0];
  std::uint32_t resends = 0;
  for (const auto& [node, kind] : tx.verdicts)
    resends += (node == bad && kind == VerdictKind::Resend) ? 1 : 0;
  CHECK(resends == cfg.resend_limit + 1);
  CHECK(tx.result.malicious_set == planted_set(st));
  REQUIRE(tx.result.excluded.size() == 1);
  CHECK(tx.result.excluded[0].second == ExclusionReason::ResendLimit);
  CHECK(tx.recovered_ok);
}

TEST_CASE("mixed adversary profiles are all identified") {
  SimConfig cfg = small_cfg(12, 2, 4,
                            {Behavior::PerturbShard, Behavior::TamperScalar,
                             Behavior::BadSecondSignature, Behavior::Silent},
                            31);
  cfg.adversary_ids = {1, 4, 7, 10};
  CommitteeState st = build_committee(cfg);
  JoinTranscript tx = run_join(cfg, st);
  CHECK(tx.result.malicious_set == std::set<std::uint32_t>{1, 4, 7, 10});
  CHECK(tx.recovered_ok);
  CHECK(tx.timeouts == 1);
  CHECK(tx.fraud_proofs.size() == 1);
  // The perturbing node (id 1) must have been caught by a code test, not a
  // protocol exclusion.
  for (const auto& [id, reason] : tx.result.excluded) CHECK(id != 1);
}

TEST_CASE("byte conservation across the event ledger") {
  SimConfig cfg = small_cfg(12, 2, 4,
                            {Behavior::PerturbShard, Behavior::TamperScalar,
                             Behavior::BadSecondSignature, Behavior::Silent},
                            37);
  CommitteeState st = build_committee(cfg);
  JoinTranscript tx = run_join(cfg, st);
  std::uint64_t send_total = 0;
  for (const auto& e : tx.events)
    if (e.kind == EventKind::Send) send_total += e.bytes;
  std::uint64_t actor_total = 0;
  for (const auto& [actor, bytes] : tx.bytes_by_actor) actor_total += bytes;
  CHECK(send_total == tx.total_bytes);
  CHECK(actor_total == tx.total_bytes);
}

TEST_CASE("event timestamps are nondecreasing and bounded by delta steps") {
  SimConfig cfg = small_cfg(8, 2, 2, {Behavior::PerturbShard, Behavior::Silent}, 41);
  CommitteeState st = build_committee(cfg);
  JoinTranscript tx = run_join(cfg, st);
  double last = 0.0;
  for (const auto& e : tx.events) {
    CHECK(e.t >= last - 1e-12);
    last = std::max(last, e.t);
  }
  CHECK(tx.elapsed == doctest::Approx(last));
}

TEST_CASE("identical seeds replay identical transcripts and aggregates") {
  SimConfig cfg = small_cfg(6, 2, 1, {Behavior::PerturbShard}, 42);
  CommitteeState st1 = build_committee(cfg);
  CommitteeState st2 = build_committee(cfg);
  JoinTranscript tx1 = run_join(cfg, st1);
  JoinTranscript tx2 = run_join(cfg, st2);
  CHECK(transcript_text(tx1) == transcript_text(tx2));

  ReplicationStats s1 = run_replications(cfg, 20);
  ReplicationStats s2 = run_replications(cfg, 20);
  CHECK(replication_csv(cfg, 20, s1) == replication_csv(cfg, 20, s2));

  SimConfig other = cfg;
  other.seed = 43;
  CommitteeState st3 = build_committee(other);
  JoinTranscript tx3 = run_join(other, st3);
  CHECK(transcript_text(tx1) != transcript_text(tx3));
}

TEST_CASE("stage A abort surfaces as JoinFailed") {
  // Two of four nodes are malicious: p0 = 1/6, so with rho = 0.5 the budget
  // is 4 trials and aborts are common; scan seeds for one.
  SimConfig cfg = small_cfg(4, 1, 2, {Behavior::PerturbShard}, 0);
  cfg.rho = 0.5;
  bool seen_failure = false;
  for (std::uint64_t seed = 0; seed < 64 && !seen_failure; ++seed) {
    cfg.seed = seed;
    CommitteeState st = build_committee(cfg);
    try {
      run_join(cfg, st);
    } catch (const JoinFailed&) {
      seen_failure = true;
    }
  }
  CHECK(seen_failure);
}

TEST_CASE("replication aggregates count failures and successes") {
  SimConfig cfg = small_cfg(6, 2, 1, {Behavior::PerturbShard}, 77);
  ReplicationStats stats = run_replications(cfg, 50);
  CHECK(stats.count == 50);
  CHECK(stats.identification_mismatches == 0);
  CHECK(stats.recovery_failures == 0);
  CHECK(stats.stage_a_failures <= 3);  // expected ~0.8% per run
  CHECK(stats.mean_trials > 0.0);
  CHECK(stats.success_rate >= 0.9);

  ReplicationStats one = run_replications(cfg, 1);
  CHECK(one.count == 1);
  CHECK(one.std_trials == 0.0);
}

TEST_CASE("ed25519-backed committees run end to end") {
  SimConfig cfg = small_cfg(6, 2, 1, {Behavior::TamperScalar}, 55);
  cfg.scheme = SchemeKind::Ed25519;
  CommitteeState st = build_committee(cfg);
  JoinTranscript tx = run_join(cfg, st);
  CHECK(tx.result.malicious_set == planted_set(st));
  CHECK(tx.recovered_ok);
  CHECK(tx.fraud_proofs.size() == 1);
}

TEST_CASE("transcript lines carry timestamp, kind, actor and detail") {
  SimConfig cfg = small_cfg(6, 2, 1, {Behavior::PerturbShard}, 42);
  CommitteeState st = build_committee(cfg);
  JoinTranscript tx = run_join(cfg, st);
  std::string text = transcript_text(tx);
  std::istringstream lines(text);
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    ++count;
    std::size_t tabs = 0;
    for (char c : line) tabs += c == '\t' ? 1 : 0;
    CHECK(tabs == 3);
  }
  CHECK(count == tx.events.size() + 1);  // trailing summary line
}
