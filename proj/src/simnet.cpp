#include "recagt/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <queue>
#include <set>

#include "recagt/csv.hpp"
#include "recagt/rng.hpp"

namespace recagt {

namespace {

// Substream tags for the per-run RNG.
constexpr std::uint64_t kStreamCaKeys = 1;
constexpr std::uint64_t kStreamNodeKeys = 2;
constexpr std::uint64_t kStreamScalars = 3;
constexpr std::uint64_t kStreamAdversaries = 4;
constexpr std::uint64_t kStreamShard = 5;
constexpr std::uint64_t kStreamPerturb = 6;
constexpr std::uint64_t kStreamDelays = 7;
constexpr std::uint64_t kStreamNewcomer = 8;

std::uint32_t scalar_width_for(std::uint64_t modulus) {
  std::uint32_t w = 0;
  std::uint64_t v = modulus - 1;
  do {
    ++w;
    v >>= 8;
  } while (v != 0);
  return w;
}

std::string node_actor(std::uint32_t id) { return "node:" + std::to_string(id); }

}  // namespace

const char* behavior_name(Behavior b) {
  switch (b) {
    case Behavior::Honest: return "honest";
    case Behavior::PerturbShard: return "perturb-shard";
    case Behavior::TamperScalar: return "tamper-scalar";
    case Behavior::BadSecondSignature: return "bad-second-signature";
    case Behavior::Silent: return "silent";
  }
  return "unknown";
}

Behavior behavior_from_name(const std::string& name) {
  for (Behavior b : {Behavior::Honest, Behavior::PerturbShard, Behavior::TamperScalar,
                     Behavior::BadSecondSignature, Behavior::Silent}) {
    if (name == behavior_name(b)) return b;
  }
  throw InvalidConfig("unknown adversary behavior: " + name);
}

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::Send: return "send";
    case EventKind::Deliver: return "deliver";
    case EventKind::Timeout: return "timeout";
    case EventKind::Test: return "test";
    case EventKind::Verdict: return "verdict";
    case EventKind::Fraud: return "fraud";
    case EventKind::Note: return "note";
  }
  return "unknown";
}

WireFormat SimConfig::wire_format(const SignatureScheme& sig_scheme) const {
  WireFormat wf;
  wf.scalar_bytes = scalar_bytes != 0 ? scalar_bytes : scalar_width_for(modulus);
  wf.signature_bytes = signature_bytes;
  if (wf.signature_bytes < sig_scheme.signature_size())
    throw InvalidConfig("signature_bytes is smaller than the scheme's signatures");
  return wf;
}

void validate(const SimConfig& cfg) {
  if (cfg.f >= cfg.n) throw InvalidConfig("adversary count must satisfy f < n");
  if (cfg.m == 0) throw InvalidConfig("shard-coding size m must be at least 1");
  if (cfg.n < static_cast<std::uint64_t>(cfg.m) + cfg.f + 1)
    throw InvalidConfig("committee must satisfy n >= m + f + 1");
  if (!(cfg.delta > 0.0)) throw InvalidConfig("delta must be positive");
  if (!(cfg.rho > 0.0 && cfg.rho < 1.0)) throw InvalidConfig("rho must lie in (0, 1)");
  if (!cfg.adversary_ids.empty()) {
    if (cfg.adversary_ids.size() != cfg.f)
      throw InvalidConfig("explicit adversary list must contain exactly f ids");
    std::set<std::uint32_t> uniq(cfg.adversary_ids.begin(), cfg.adversary_ids.end());
    if (uniq.size() != cfg.adversary_ids.size())
      throw InvalidConfig("duplicate adversary id");
    if (!uniq.empty() && *uniq.rbegin() >= cfg.n)
      throw InvalidConfig("adversary id out of range");
  }
}

CommitteeState build_committee(const SimConfig& cfg) {
  validate(cfg);
  CommitteeState st;
  st.cfg = cfg;
  const Field field = cfg.field();
  st.scheme = make_scheme(cfg.scheme);
  Rng root(cfg.seed);

  {
    Rng r = root.child(kStreamCaKeys);
    st.ca_keys = st.scheme->keygen(r);
  }
  {
    Rng r = root.child(kStreamScalars);
    st.identities = ca_init_committee(cfg.n, field, st.ca_keys, *st.scheme, r);
  }
  {
    Rng r = root.child(kStreamNodeKeys);
    st.node_keys.reserve(cfg.n);
    for (std::uint32_t i = 0; i < cfg.n; ++i) st.node_keys.push_back(st.scheme->keygen(r));
  }

  if (!cfg.adversary_ids.empty()) {
    st.adversaries = cfg.adversary_ids;
  } else if (cfg.f > 0) {
    Rng r = root.child(kStreamAdversaries);
    st.adversaries = r.sample(cfg.n, cfg.f);
  }
  std::sort(st.adversaries.begin(), st.adversaries.end());

  st.behavior.assign(cfg.n, Behavior::Honest);
  const std::vector<Behavior>& palette =
      cfg.adversary_behaviors.empty() ? std::vector<Behavior>{Behavior::PerturbShard}
                                      : cfg.adversary_behaviors;
  for (std::size_t k = 0; k < st.adversaries.size(); ++k) {
    st.behavior[st.adversaries[k]] = palette[k % palette.size()];
  }

  {
    Rng r = root.child(kStreamShard);
    st.original_bytes.resize(cfg.shard_bytes);
    for (std::size_t i = 0; i < st.original_bytes.size(); i += 8) {
      std::uint64_t v = r.next_u64();
      for (std::size_t k = 0; k < 8 && i + k < st.original_bytes.size(); ++k)
        st.original_bytes[i + k] = static_cast<std::uint8_t>((v >> (8 * k)) & 0xff);
    }
  }
  st.original_shard = shard_from_bytes(st.original_bytes, cfg.m, field);

  st.stored.reserve(cfg.n);
  for (std::uint32_t i = 0; i < cfg.n; ++i)
    st.stored.push_back(encode(st.original_shard, st.identities[i].scalar, field));

  // A perturbing node holds a corrupted copy and serves it consistently.
  Rng perturb = root.child(kStreamPerturb);
  for (std::uint32_t i = 0; i < cfg.n; ++i) {
    if (st.behavior[i] != Behavior::PerturbShard) continue;
    auto& values = st.stored[i].values;
    bool nonzero = false;
    do {
      for (auto& v : values) {
        FieldElement delta = field.from_u64(perturb.below(field.modulus()));
        if (delta.value != 0) nonzero = true;
        v = field.add(v, delta);
      }
    } while (!values.empty() && !nonzero);
  }
  return st;
}

namespace {

/// One join simulated end to end. Owns the event queue, the message cache and
/// the byte ledger; exposes the group-test oracle the identification driver
/// consumes.
class JoinSession {
public:
  JoinSession(const SimConfig& cfg, CommitteeState& st)
      : cfg_(cfg),
        st_(st),
        field_(cfg.field()),
        wire_(cfg.wire_format(*st.scheme)),
        delays_(Rng(cfg.seed).child(kStreamDelays)),
        newcomer_rng_(Rng(cfg.seed).child(kStreamNewcomer)) {}

  JoinTranscript run() {
    issue_newcomer_credentials();

    Oracle oracle(*this);
    GtConfig gt{cfg_.n, cfg_.m, cfg_.f, cfg_.rho, cfg_.seed};
    IdentifyOptions opts;
    opts.assert_noiseless = cfg_.assert_noiseless;
    try {
      tx_.result = identify_malicious(gt, oracle, opts);
    } catch (const StageAFailed& e) {
      throw JoinFailed(std::string("join aborted: ") + e.what());
    }

    recover_shard();
    tx_.elapsed = now_;
    for (const auto& e : tx_.events) {
      if (e.kind == EventKind::Send) {
        tx_.bytes_by_actor[e.actor] += e.bytes;
        tx_.total_bytes += e.bytes;
      }
    }
    return std::move(tx_);
  }

private:
  struct Queued {
    double t;
    std::uint64_t seq;
    enum class Kind { Deliver, Timeout, CaVerdict } kind;
    std::uint32_t node;
    std::uint32_t attempt;
  };
  struct Later {
    bool operator()(const Queued& a, const Queued& b) const {
      return a.t > b.t || (a.t == b.t && a.seq > b.seq);
    }
  };

  class Oracle final : public TestOracle {
   public:
    explicit Oracle(JoinSession& session) : session_(session) {}

   protected:
    Verdict do_test(const std::vector<std::uint32_t>& nodes) override {
      session_.gather(nodes);
      return session_.parity_test(nodes);
    }

   private:
    JoinSession& session_;
  };

  void log(EventKind kind, const std::string& actor, const std::string& detail,
           std::uint64_t bytes = 0) {
    tx_.events.push_back({now_, event_seq_++, kind, actor, detail, bytes});
  }

  void schedule(Queued::Kind kind, std::uint32_t node, std::uint32_t attempt, double at) {
    queue_.push({at, queue_seq_++, kind, node, attempt});
  }

  void issue_newcomer_credentials() {
    // Fresh scalar distinct from every committee scalar.
    std::set<std::uint64_t> used;
    for (const auto& id : st_.identities) used.insert(id.scalar.value);
    if (used.size() + 1 >= field_.modulus())
      throw CommitteeTooLarge("no scalar left for the newcomer");
    std::uint64_t v;
    do {
      v = 1 + newcomer_rng_.below(field_.modulus() - 1);
    } while (used.count(v) != 0);
    newcomer_identity_.node_id = cfg_.n;
    newcomer_identity_.scalar = {v};
    newcomer_identity_.ca_signature = st_.scheme->sign(
        scalar_binding(newcomer_identity_.scalar, cfg_.n), st_.ca_keys.secret_key);
    newcomer_keys_ = st_.scheme->keygen(newcomer_rng_);

    // Credential message: scalar + CA signature + issued secret key.
    const std::uint64_t credential_bytes =
        wire_.scalar_bytes + wire_.signature_bytes + 128;
    log(EventKind::Send, "ca", "newcomer credentials", credential_bytes);
    const double at = now_ + delays_.delay(cfg_.delta);
    now_ = at;
    log(EventKind::Deliver, "new", "credentials received");
    if (member_verify_scalar(newcomer_identity_, st_.ca_keys.public_key, *st_.scheme) !=
        ScalarCheck::Accept) {
      throw JoinFailed("newcomer credential verification failed");
    }
    log(EventKind::Note, "new", "credential signature verified");
  }

  SignedShardMessage craft_message(std::uint32_t node) {
    auto it = message_cache_.find(node);
    if (it != message_cache_.end()) return it->second;
    SignedShardMessage msg = member_build_message(
        st_.identities[node], st_.node_keys[node].secret_key, st_.stored[node], *st_.scheme);
    switch (st_.behavior[node]) {
      case Behavior::Honest:
      case Behavior::PerturbShard:
        break;  // perturbation already lives in the stored shard
      case Behavior::TamperScalar: {
        std::uint64_t forged = msg.scalar.value % (field_.modulus() - 1) + 1;
        if (forged == msg.scalar.value) forged = forged % (field_.modulus() - 1) + 1;
        msg.scalar = {forged};
        msg.payload.x = msg.scalar;
        break;
      }
      case Behavior::BadSecondSignature: {
        Bytes wrong = msg.first_sig;
        wrong[0] ^= 0xff;
        msg.second_sig = st_.scheme->sign(wrong, st_.node_keys[node].secret_key);
        break;
      }
      case Behavior::Silent:
        throw Error("silent node asked to craft a message");
    }
    message_cache_.emplace(node, msg);
    return msg;
  }

  void request_message(std::uint32_t node, std::uint32_t attempt) {
    log(EventKind::Send, "new",
        (attempt == 0 ? "request shard message from " : "resend request to ") +
            node_actor(node));
    if (st_.behavior[node] == Behavior::Silent) {
      schedule(Queued::Kind::Timeout, node, attempt, now_ + cfg_.delta);
    } else {
      schedule(Queued::Kind::Deliver, node, attempt, now_ + delays_.delay(cfg_.delta));
    }
  }

  /// Obtain (or re-use) accepted shard messages for every node in the group.
  /// Throws ExcludedNodesSignal after recording the relevant events when
  /// protocol-level checks disqualify nodes.
  void gather(const std::vector<std::uint32_t>& nodes) {
    std::vector<std::pair<std::uint32_t, ExclusionReason>> exclusions;
    bool any_request = false;
    for (auto node : nodes) {
      if (accepted_.count(node)) continue;
      request_message(node, 0);
      any_request = true;
    }
    if (!any_request) return;

    while (!queue_.empty()) {
      Queued ev = queue_.top();
      queue_.pop();
      now_ = ev.t;
      switch (ev.kind) {
        case Queued::Kind::Timeout: {
          ++tx_.timeouts;
          log(EventKind::Timeout, node_actor(ev.node), "no response within delta");
          exclusions.emplace_back(ev.node, ExclusionReason::Timeout);
          break;
        }
        case Queued::Kind::Deliver: {
          SignedShardMessage msg = craft_message(ev.node);
          const std::uint64_t sz = wire_message_size(wire_, msg.payload.values.size());
          log(EventKind::Send, node_actor(ev.node), "shard message to new", sz);
          log(EventKind::Deliver, "new", "shard message from " + node_actor(ev.node));
          handle_delivery(ev.node, ev.attempt, msg, exclusions);
          break;
        }
        case Queued::Kind::CaVerdict: {
          handle_ca_verdict(ev.node, exclusions);
          break;
        }
      }
    }

    if (!exclusions.empty()) throw ExcludedNodesSignal{std::move(exclusions)};
  }

  void handle_delivery(std::uint32_t node, std::uint32_t attempt,
                       const SignedShardMessage& msg,
                       std::vector<std::pair<std::uint32_t, ExclusionReason>>& exclusions) {
    VerificationVerdict verdict = newcomer_verify_message(
        msg, st_.node_keys[node].public_key, st_.ca_keys.public_key, *st_.scheme);
    tx_.verdicts.emplace_back(node, verdict.kind);
    switch (verdict.kind) {
      case VerdictKind::Accept:
        log(EventKind::Verdict, "new", node_actor(node) + " accepted");
        accepted_.emplace(node, msg);
        break;
      case VerdictKind::Resend:
        log(EventKind::Verdict, "new", node_actor(node) + " second signature invalid");
        if (attempt < cfg_.resend_limit) {
          request_message(node, attempt + 1);
        } else {
          log(EventKind::Note, "new",
              node_actor(node) + " exceeded resend limit; marked uncooperative");
          exclusions.emplace_back(node, ExclusionReason::ResendLimit);
        }
        break;
      case VerdictKind::FraudProof: {
        log(EventKind::Verdict, "new", node_actor(node) + " scalar inconsistent with CA signature");
        tx_.fraud_proofs.push_back(*verdict.fraud_proof);
        pending_proofs_.emplace(node, *verdict.fraud_proof);
        const std::uint64_t sz = wire_message_size(wire_, msg.payload.values.size());
        log(EventKind::Fraud, "new", "fraud proof against " + node_actor(node));
        log(EventKind::Send, "new", "fraud proof forwarded to ca", sz);
        schedule(Queued::Kind::CaVerdict, node, 0, now_ + delays_.delay(cfg_.delta));
        break;
      }
    }
  }

  void handle_ca_verdict(std::uint32_t node,
                         std::vector<std::pair<std::uint32_t, ExclusionReason>>& exclusions) {
    auto it = pending_proofs_.find(node);
    if (it == pending_proofs_.end()) throw Error("CA verdict without pending proof");
    Adjudication adj = ca_adjudicate_fraud(it->second, st_.node_keys[node].public_key,
                                           st_.ca_keys.public_key, *st_.scheme);
    pending_proofs_.erase(it);
    if (adj.guilty) {
      log(EventKind::Verdict, "ca", node_actor(node) + " guilty");
      exclusions.emplace_back(node, ExclusionReason::FraudProven);
    } else {
      log(EventKind::Verdict, "ca", node_actor(node) + " unproven");
    }
  }

  Verdict parity_test(const std::vector<std::uint32_t>& nodes) {
    TestGroup group;
    std::vector<CodedShard> coded;
    group.members.reserve(nodes.size());
    coded.reserve(nodes.size());
    for (auto node : nodes) {
      auto it = accepted_.find(node);
      if (it == accepted_.end()) throw Error("parity test over a missing message");
      group.members.push_back({node, it->second.scalar});
      coded.push_back(it->second.payload);
    }
    ParityVector pv = parity_vector(group, field_);
    TestOutcome outcome = run_test(group, coded, pv, field_);

    std::string ids;
    for (auto node : nodes) ids += (ids.empty() ? "" : "+") + std::to_string(node);
    log(EventKind::Test, "new",
        "group=" + ids + " verdict=" +
            (outcome.verdict == Verdict::Honest ? "honest" : "positive"));
    return outcome.verdict;
  }

  void recover_shard() {
    std::vector<CodedShard> subset;
    for (auto id : tx_.result.honest_set) {
      if (subset.size() == cfg_.m) break;
      auto it = accepted_.find(id);
      if (it == accepted_.end()) continue;
      subset.push_back(it->second.payload);
    }
    if (subset.size() < cfg_.m) {
      log(EventKind::Note, "new", "too few accepted honest shards to decode");
      return;
    }
    Shard recovered = decode(subset, field_, st_.original_bytes.size());
    Bytes bytes = decode_to_bytes(recovered, field_);
    tx_.recovered_ok = bytes == st_.original_bytes;
    log(EventKind::Note, "new",
        tx_.recovered_ok ? "recovered shard matches ground truth"
                         : "recovered shard MISMATCH");
  }

  const SimConfig& cfg_;
  CommitteeState& st_;
  Field field_;
  WireFormat wire_;
  Rng delays_;
  Rng newcomer_rng_;

  double now_ = 0.0;
  std::uint64_t event_seq_ = 0;
  std::uint64_t queue_seq_ = 0;
  std::priority_queue<Queued, std::vector<Queued>, Later> queue_;
  std::map<std::uint32_t, SignedShardMessage> accepted_;
  std::map<std::uint32_t, SignedShardMessage> message_cache_;
  std::map<std::uint32_t, SignedShardMessage> pending_proofs_;
  NodeIdentity newcomer_identity_;
  KeyPair newcomer_keys_;
  JoinTranscript tx_;
};

}  // namespace

JoinTranscript run_join(const SimConfig& cfg, CommitteeState& committee) {
  JoinSession session(cfg, committee);
  return session.run();
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint32_t replication) {
  std::uint64_t s = base_seed ^ (0x9e3779b97f4a7c15ULL * (replication + 1));
  return splitmix64(s);
}

ReplicationStats run_replications(const SimConfig& cfg, std::uint32_t count) {
  if (count == 0) throw InvalidConfig("replication count must be at least 1");
  ReplicationStats stats;
  stats.count = count;
  std::vector<double> trials;
  trials.reserve(count);
  double bytes_sum = 0.0, elapsed_sum = 0.0;
  for (std::uint32_t r = 0; r < count; ++r) {
    SimConfig c = cfg;
    c.seed = replication_seed(cfg.seed, r);
    CommitteeState st = build_committee(c);
    try {
      JoinTranscript tx = run_join(c, st);
      std::set<std::uint32_t> planted(st.adversaries.begin(), st.adversaries.end());
      if (tx.result.malicious_set != planted) ++stats.identification_mismatches;
      if (!tx.recovered_ok) ++stats.recovery_failures;
      trials.push_back(static_cast<double>(tx.result.trials_used));
      bytes_sum += static_cast<double>(tx.total_bytes);
      elapsed_sum += tx.elapsed;
    } catch (const JoinFailed&) {
      ++stats.stage_a_failures;
    }
  }
  const std::size_t ok = trials.size();
  if (ok > 0) {
    double sum = 0.0;
    for (double t : trials) sum += t;
    stats.mean_trials = sum / static_cast<double>(ok);
    double var = 0.0;
    for (double t : trials) var += (t - stats.mean_trials) * (t - stats.mean_trials);
    stats.std_trials = ok > 1 ? std::sqrt(var / static_cast<double>(ok - 1)) : 0.0;
    stats.mean_bytes = bytes_sum / static_cast<double>(ok);
    stats.mean_elapsed = elapsed_sum / static_cast<double>(ok);
  }
  stats.success_rate =
      static_cast<double>(count - stats.stage_a_failures - stats.identification_mismatches) /
      static_cast<double>(count);
  return stats;
}

void write_transcript(const JoinTranscript& tx, std::ostream& out) {
  char ts[32];
  for (const auto& e : tx.events) {
    std::snprintf(ts, sizeof(ts), "%.6f", e.t);
    out << ts << '\t' << event_kind_name(e.kind) << '\t' << e.actor << '\t';
    if (e.kind == EventKind::Send) out << "bytes=" << e.bytes << ' ';
    out << e.detail << '\n';
  }
  std::snprintf(ts, sizeof(ts), "%.6f", tx.elapsed);
  out << ts << "\tnote\tnew\tjoin complete trials=" << tx.result.trials_used
      << " malicious=";
  bool first = true;
  for (auto id : tx.result.malicious_set) {
    if (!first) out << '+';
    out << id;
    first = false;
  }
  if (first) out << "none";
  out << " recovered=" << (tx.recovered_ok ? "yes" : "no") << '\n';
}

std::string replication_csv(const SimConfig& cfg, std::uint32_t count,
                            const ReplicationStats& stats) {
  CsvWriter csv;
  csv.comment("n", CsvWriter::num(std::uint64_t{cfg.n}));
  csv.comment("m", CsvWriter::num(std::uint64_t{cfg.m}));
  csv.comment("f", CsvWriter::num(std::uint64_t{cfg.f}));
  csv.comment("delta", CsvWriter::num(cfg.delta));
  csv.comment("rho", CsvWriter::num(cfg.rho));
  csv.comment("modulus", CsvWriter::num(cfg.modulus));
  csv.comment("bytes_per_element", CsvWriter::num(std::uint64_t{cfg.bytes_per_element}));
  csv.comment("shard_bytes", CsvWriter::num(cfg.shard_bytes));
  csv.comment("seed", CsvWriter::num(cfg.seed));
  csv.comment("scheme", cfg.scheme == SchemeKind::KeyedHash ? "keyed-hash" : "ed25519");
  csv.comment("replications", CsvWriter::num(std::uint64_t{count}));
  csv.columns({"count", "stage_a_failures", "identification_mismatches", "recovery_failures",
               "success_rate", "mean_trials", "std_trials", "mean_bytes", "mean_elapsed"});
  csv.row({CsvWriter::num(std::uint64_t{stats.count}),
           CsvWriter::num(std::uint64_t{stats.stage_a_failures}),
           CsvWriter::num(std::uint64_t{stats.identification_mismatches}),
           CsvWriter::num(std::uint64_t{stats.recovery_failures}),
           CsvWriter::num(stats.success_rate), CsvWriter::num(stats.mean_trials),
           CsvWriter::num(stats.std_trials), CsvWriter::num(stats.mean_bytes),
           CsvWriter::num(stats.mean_elapsed)});
  return csv.content();
}

}  // namespace recagt
