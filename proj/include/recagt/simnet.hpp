#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "recagt/grouptest.hpp"
#include "recagt/identity.hpp"

namespace recagt {

/// What a node does when the newcomer requests its shard message.
enum class Behavior {
  Honest,              // correct message, correct payload
  PerturbShard,        // valid signatures over a corrupted stored shard
  TamperScalar,        // substituted scalar under the original CA signature
  BadSecondSignature,  // counter-signature over the wrong bytes
  Silent               // never responds
};

const char* behavior_name(Behavior b);
Behavior behavior_from_name(const std::string& name);

struct SimConfig {
  std::uint32_t n = 6;
  std::uint32_t m = 2;
  std::uint32_t f = 1;
  std::vector<std::uint32_t> adversary_ids;   // explicit ids; empty = seeded draw
  std::vector<Behavior> adversary_behaviors;  // cycled across adversaries
  double delta = 1.0;                         // max network delay
  std::uint64_t modulus = Field::kMersenne61;
  unsigned bytes_per_element = 7;
  std::uint64_t shard_bytes = 1024;           // original shard size b
  std::uint64_t seed = 0;
  double rho = 0.01;
  std::uint32_t signature_bytes = 256;        // wire z
  std::uint32_t scalar_bytes = 0;             // wire w; 0 = derived from modulus
  SchemeKind scheme = SchemeKind::KeyedHash;
  std::uint32_t resend_limit = 1;
  bool assert_noiseless = true;

  Field field() const { return Field(modulus, bytes_per_element); }
  WireFormat wire_format(const SignatureScheme& scheme) const;
};

void validate(const SimConfig& cfg);

/// A fully initialized committee: identities, keys, per-node stored coded
/// shards (already corrupted for PerturbShard adversaries) and the ground
/// truth they were derived from.
struct CommitteeState {
  SimConfig cfg;
  std::unique_ptr<SignatureScheme> scheme;
  KeyPair ca_keys;
  std::vector<NodeIdentity> identities;
  std::vector<KeyPair> node_keys;
  std::vector<Behavior> behavior;          // size n
  std::vector<std::uint32_t> adversaries;  // sorted
  Bytes original_bytes;
  Shard original_shard;
  std::vector<CodedShard> stored;          // size n
};

CommitteeState build_committee(const SimConfig& cfg);

enum class EventKind { Send, Deliver, Timeout, Test, Verdict, Fraud, Note };

const char* event_kind_name(EventKind k);

/// One simulation event. Events are recorded in processing order:
/// nondecreasing timestamp, ties broken by sequence number.
struct SimEvent {
  double t = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Note;
  std::string actor;
  std::string detail;
  std::uint64_t bytes = 0;  // payload bytes for Send events, else 0
};

struct JoinTranscript {
  std::vector<SimEvent> events;
  std::vector<std::pair<std::uint32_t, VerdictKind>> verdicts;  // per delivery
  std::vector<SignedShardMessage> fraud_proofs;
  IdentificationResult result;
  double elapsed = 0.0;
  std::map<std::string, std::uint64_t> bytes_by_actor;  // sender -> bytes
  std::uint64_t total_bytes = 0;
  std::uint32_t timeouts = 0;
  bool recovered_ok = false;
};

/// Simulate one full join: credential issuance, adaptive group testing over
/// signed shard messages, fraud handling, and final shard recovery checked
/// against ground truth. Throws JoinFailed when identification aborts.
JoinTranscript run_join(const SimConfig& cfg, CommitteeState& committee);

struct ReplicationStats {
  std::uint32_t count = 0;
  std::uint32_t stage_a_failures = 0;
  std::uint32_t identification_mismatches = 0;
  std::uint32_t recovery_failures = 0;
  double success_rate = 0.0;
  double mean_trials = 0.0;
  double std_trials = 0.0;
  double mean_bytes = 0.0;
  double mean_elapsed = 0.0;
};

/// Independent seeded replications of build + join; aggregates are
/// deterministic for a fixed (config, seed, count).
ReplicationStats run_replications(const SimConfig& cfg, std::uint32_t count);

/// Line-delimited transcript: "timestamp<TAB>kind<TAB>actor<TAB>detail".
void write_transcript(const JoinTranscript& tx, std::ostream& out);

/// Aggregate CSV with the resolved configuration as a comment header.
std::string replication_csv(const SimConfig& cfg, std::uint32_t count,
                            const ReplicationStats& stats);

/// Seed used for replication r of a run keyed by base_seed.
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint32_t replication);

}  // namespace recagt
