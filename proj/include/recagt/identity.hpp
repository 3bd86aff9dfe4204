#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>

#include "recagt/codes.hpp"
#include "recagt/common.hpp"
#include "recagt/rng.hpp"

namespace recagt {

struct KeyPair {
  Bytes secret_key;
  Bytes public_key;
};

/// SHA-256 digest of a message.
Bytes sha256(std::span<const std::uint8_t> msg);

/// MD5 digest (16 bytes); used only by the checksum baseline.
Bytes md5(std::span<const std::uint8_t> msg);

/// Abstract signature scheme: keygen / sign / verify.
///
/// Two implementations are provided. Ed25519Scheme is a real asymmetric
/// scheme with keys derived from the caller's RNG, so runs replay
/// deterministically. KeyedHashScheme is an HMAC-SHA256 construction whose
/// verification looks up the signing key through an internal registry keyed
/// by the public identifier; it exists for fast, reproducible simulation and
/// offers no asymmetric security.
class SignatureScheme {
public:
  virtual ~SignatureScheme() = default;
  virtual std::string name() const = 0;
  virtual std::size_t signature_size() const = 0;
  virtual KeyPair keygen(Rng& rng) = 0;
  virtual Bytes sign(std::span<const std::uint8_t> msg, const Bytes& secret_key) const = 0;
  virtual bool verify(std::span<const std::uint8_t> sig, std::span<const std::uint8_t> msg,
                      const Bytes& public_key) const = 0;
};

class Ed25519Scheme final : public SignatureScheme {
public:
  std::string name() const override { return "ed25519"; }
  std::size_t signature_size() const override { return 64; }
  KeyPair keygen(Rng& rng) override;
  Bytes sign(std::span<const std::uint8_t> msg, const Bytes& secret_key) const override;
  bool verify(std::span<const std::uint8_t> sig, std::span<const std::uint8_t> msg,
              const Bytes& public_key) const override;
};

class KeyedHashScheme final : public SignatureScheme {
public:
  std::string name() const override { return "keyed-hash"; }
  std::size_t signature_size() const override { return 32; }
  KeyPair keygen(Rng& rng) override;
  Bytes sign(std::span<const std::uint8_t> msg, const Bytes& secret_key) const override;
  bool verify(std::span<const std::uint8_t> sig, std::span<const std::uint8_t> msg,
              const Bytes& public_key) const override;

private:
  std::unordered_map<std::string, Bytes> registry_;  // public id -> secret key
};

enum class SchemeKind { KeyedHash, Ed25519 };

std::unique_ptr<SignatureScheme> make_scheme(SchemeKind kind);

/// A committee member's credential: its scalar and the CA's signature over
/// the scalar bound to the node id.
struct NodeIdentity {
  std::uint32_t node_id = 0;
  FieldElement scalar;
  Bytes ca_signature;
};

/// Canonical byte payload the CA signs: 8-byte big-endian scalar followed by
/// the 4-byte big-endian node id. Binding the id prevents two nodes from
/// swapping credentials.
Bytes scalar_binding(FieldElement scalar, std::uint32_t node_id);

/// Phase 1: assign pairwise-distinct nonzero scalars to n nodes and sign each
/// binding with the CA key. Throws CommitteeTooLarge if n >= q.
std::vector<NodeIdentity> ca_init_committee(std::uint32_t n, const Field& field,
                                            const KeyPair& ca_keys,
                                            SignatureScheme& scheme, Rng& rng);

enum class ScalarCheck { Accept, ResendRequest };

/// Phase 1, member side: accept the assigned scalar iff the CA signature
/// verifies on it.
ScalarCheck member_verify_scalar(const NodeIdentity& ident, const Bytes& ca_public_key,
                                 const SignatureScheme& scheme);

/// Phase 2 message: the member's scalar, the CA signature over it, the
/// member's counter-signature over that CA signature, and the coded payload.
struct SignedShardMessage {
  std::uint32_t sender_id = 0;
  FieldElement scalar;
  Bytes first_sig;   // CA signature over scalar_binding(scalar, sender_id)
  Bytes second_sig;  // sender signature over first_sig
  CodedShard payload;
};

/// Phase 2, member side: counter-sign the CA signature and attach the coded
/// shard.
SignedShardMessage member_build_message(const NodeIdentity& ident, const Bytes& secret_key,
                                        const CodedShard& coded,
                                        const SignatureScheme& scheme);

enum class VerdictKind { Accept, Resend, FraudProof };

struct VerificationVerdict {
  VerdictKind kind = VerdictKind::Accept;
  std::optional<SignedShardMessage> fraud_proof;  // set iff kind == FraudProof
};

/// Phase 3, newcomer side. Accept if both signatures verify; request a resend
/// if the second signature is invalid (possible transmission error); emit a
/// fraud proof if the second signature is valid but the CA signature is
/// inconsistent with the claimed scalar.
VerificationVerdict newcomer_verify_message(const SignedShardMessage& msg,
                                            const Bytes& sender_public_key,
                                            const Bytes& ca_public_key,
                                            const SignatureScheme& scheme);

struct Adjudication {
  bool guilty = false;
  std::uint32_t node_id = 0;  // meaningful iff guilty
};

/// CA side: a fraud proof convicts iff the sender authenticated the message
/// (second signature verifies) and the CA signature fails against the claimed
/// scalar. Anything else is unproven.
Adjudication ca_adjudicate_fraud(const SignedShardMessage& proof,
                                 const Bytes& sender_public_key,
                                 const Bytes& ca_public_key,
                                 const SignatureScheme& scheme);

/// Fixed wire sizes for serialized shard messages. Signature fields are
/// zero-padded to signature_bytes; the scalar is big-endian in scalar_bytes.
struct WireFormat {
  std::uint32_t scalar_bytes = 1;
  std::uint32_t signature_bytes = 256;
};

/// Wire layout: [sender_id:4 BE][scalar:w BE][first sig:z][second sig:z]
/// [payload byte length:8 BE][payload], payload = 8-byte BE field elements.
Bytes serialize_message(const SignedShardMessage& msg, const WireFormat& wf);

/// Inverse of serialize_message. signature_size gives the meaningful prefix
/// of each z-byte signature field; the padding must be zero.
SignedShardMessage parse_message(std::span<const std::uint8_t> data, const WireFormat& wf,
                                 std::size_t signature_size);

/// Serialized size of a message carrying value_count payload elements.
std::uint64_t wire_message_size(const WireFormat& wf, std::uint64_t value_count);

}  // namespace recagt
