#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "recagt/identity.hpp"

using namespace recagt;

namespace {

struct ProtocolFixture {
  Field field = Field::mersenne61();
  std::unique_ptr<SignatureScheme> scheme;
  Rng rng{99};
  KeyPair ca;
  std::vector<NodeIdentity> identities;
  std::vector<KeyPair> keys;

  explicit ProtocolFixture(SchemeKind kind, std::uint32_t n = 4)
      : scheme(make_scheme(kind)) {
    ca = scheme->keygen(rng);
    identities = ca_init_committee(n, field, ca, *scheme, rng);
    for (std::uint32_t i = 0; i < n; ++i) keys.push_back(scheme->keygen(rng));
  }

  SignedShardMessage honest_message(std::uint32_t i) const {
    CodedShard coded{identities[i].scalar, {{1}, {2}, {3}}};
    return member_build_message(identities[i], keys[i].secret_key, coded, *scheme);
  }
};

Bytes as_bytes(const char* s) {
  return Bytes(reinterpret_cast<const std::uint8_t*>(s),
               reinterpret_cast<const std::uint8_t*>(s) + std::char_traits<char>::length(s));
}

}  // namespace

TEST_CASE("sign/verify round trip and tampering for both schemes") {
  for (SchemeKind kind : {SchemeKind::KeyedHash, SchemeKind::Ed25519}) {
    auto scheme = make_scheme(kind);
    Rng rng(5);
    KeyPair a = scheme->keygen(rng);
    KeyPair b = scheme->keygen(rng);
    Bytes msg = as_bytes("attack at dawn");
    Bytes sig = scheme->sign(msg, a.secret_key);
    CHECK(sig.size() == scheme->signature_size());
    CHECK(scheme->verify(sig, msg, a.public_key));

    Bytes msg2 = msg;
    msg2.push_back(0x00);
    CHECK_FALSE(scheme->verify(sig, msg2, a.public_key));

    Bytes sig2 = sig;
    sig2[0] ^= 0x01;
    CHECK_FALSE(scheme->verify(sig2, msg, a.public_key));

    CHECK_FALSE(scheme->verify(sig, msg, b.public_key));
  }
}

TEST_CASE("signing is deterministic under a fixed seed") {
  for (SchemeKind kind : {SchemeKind::KeyedHash, SchemeKind::Ed25519}) {
    auto s1 = make_scheme(kind);
    auto s2 = make_scheme(kind);
    Rng r1(123), r2(123);
    KeyPair k1 = s1->keygen(r1);
    KeyPair k2 = s2->keygen(r2);
    CHECK(k1.public_key == k2.public_key);
    Bytes msg = as_bytes("replay");
    CHECK(s1->sign(msg, k1.secret_key) == s2->sign(msg, k2.secret_key));
  }
}

TEST_CASE("malformed keys are rejected") {
  auto scheme = make_scheme(SchemeKind::KeyedHash);
  Bytes short_key(5, 0xaa);
  CHECK_THROWS_AS(scheme->sign(as_bytes("x"), short_key), MalformedKey);
  CHECK_THROWS_AS(scheme->verify(Bytes(32, 0), as_bytes("x"), short_key), MalformedKey);
}

TEST_CASE("committee initialization assigns distinct nonzero signed scalars") {
  Field f = Field::mersenne61();
  auto scheme = make_scheme(SchemeKind::KeyedHash);
  Rng rng(1);
  KeyPair ca = scheme->keygen(rng);
  auto identities = ca_init_committee(6, f, ca, *scheme, rng);
  REQUIRE(identities.size() == 6);
  std::set<std::uint64_t> scalars;
  for (const auto& id : identities) {
    CHECK(id.scalar.value != 0);
    scalars.insert(id.scalar.value);
    CHECK(member_verify_scalar(id, ca.public_key, *scheme) == ScalarCheck::Accept);
  }
  CHECK(scalars.size() == 6);
}

TEST_CASE("small-field committees stay within the scalar space") {
  Field f(11, 0);
  auto scheme = make_scheme(SchemeKind::KeyedHash);
  Rng rng(2);
  KeyPair ca = scheme->keygen(rng);
  auto identities = ca_init_committee(3, f, ca, *scheme, rng);
  std::set<std::uint64_t> scalars;
  for (const auto& id : identities) {
    CHECK(id.scalar.value >= 1);
    CHECK(id.scalar.value <= 10);
    scalars.insert(id.scalar.value);
  }
  CHECK(scalars.size() == 3);
  Rng rng2(3);
  CHECK_THROWS_AS(ca_init_committee(12, f, ca, *scheme, rng2), CommitteeTooLarge);
}

TEST_CASE("scalar verification detects tampering") {
  ProtocolFixture fx(SchemeKind::KeyedHash);
  NodeIdentity tampered = fx.identities[0];
  tampered.scalar = fx.field.add(tampered.scalar, fx.field.one());
  CHECK(member_verify_scalar(tampered, fx.ca.public_key, *fx.scheme) ==
        ScalarCheck::ResendRequest);

  NodeIdentity truncated = fx.identities[1];
  truncated.ca_signature.pop_back();
  CHECK(member_verify_scalar(truncated, fx.ca.public_key, *fx.scheme) ==
        ScalarCheck::ResendRequest);
}

TEST_CASE("phase 3 decision table is exhaustive over signature validity") {
  for (SchemeKind kind : {SchemeKind::KeyedHash, SchemeKind::Ed25519}) {
    ProtocolFixture fx(kind);
    const std::uint32_t i = 2;

    // (first valid, second valid) -> accept
    SignedShardMessage msg = fx.honest_message(i);
    auto v = newcomer_verify_message(msg, fx.keys[i].public_key, fx.ca.public_key,
                                     *fx.scheme);
    CHECK(v.kind == VerdictKind::Accept);

    // (first valid, second invalid) -> resend
    SignedShardMessage bad_second = fx.honest_message(i);
    bad_second.second_sig[3] ^= 0x40;
    v = newcomer_verify_message(bad_second, fx.keys[i].public_key, fx.ca.public_key,
                                *fx.scheme);
    CHECK(v.kind == VerdictKind::Resend);

    // (first invalid, second invalid) -> resend: the first signature bytes
    // were corrupted in flight, which also breaks the counter-signature.
    SignedShardMessage bad_first = fx.honest_message(i);
    bad_first.first_sig[0] ^= 0x01;
    v = newcomer_verify_message(bad_first, fx.keys[i].public_key, fx.ca.public_key,
                                *fx.scheme);
    CHECK(v.kind == VerdictKind::Resend);

    // (first invalid, second valid) -> fraud proof: scalar substituted, CA
    // signature kept, counter-signature honestly produced by the sender.
    SignedShardMessage fraud = fx.honest_message(i);
    fraud.scalar = fx.field.add(fraud.scalar, fx.field.one());
    fraud.payload.x = fraud.scalar;
    v = newcomer_verify_message(fraud, fx.keys[i].public_key, fx.ca.public_key,
                                *fx.scheme);
    REQUIRE(v.kind == VerdictKind::FraudProof);
    REQUIRE(v.fraud_proof.has_value());

    Adjudication adj = ca_adjudicate_fraud(*v.fraud_proof, fx.keys[i].public_key,
                                           fx.ca.public_key, *fx.scheme);
    CHECK(adj.guilty);
    CHECK(adj.node_id == i);
  }
}

TEST_CASE("counter-signature over the wrong payload fails the first check") {
  ProtocolFixture fx(SchemeKind::KeyedHash);
  SignedShardMessage msg = fx.honest_message(0);
  Bytes wrong = msg.first_sig;
  wrong[0] ^= 0xff;
  msg.second_sig = fx.scheme->sign(wrong, fx.keys[0].secret_key);
  auto v = newcomer_verify_message(msg, fx.keys[0].public_key, fx.ca.public_key,
                                   *fx.scheme);
  CHECK(v.kind == VerdictKind::Resend);
}

TEST_CASE("adjudication never convicts on honest or unattributable messages") {
  ProtocolFixture fx(SchemeKind::KeyedHash);

  // Fully honest message submitted as a proof.
  SignedShardMessage honest = fx.honest_message(1);
  CHECK_FALSE(ca_adjudicate_fraud(honest, fx.keys[1].public_key, fx.ca.public_key,
                                  *fx.scheme)
                  .guilty);

  // Forged second signature: the sender cannot be pinned.
  SignedShardMessage unpinned = fx.honest_message(1);
  unpinned.scalar = fx.field.add(unpinned.scalar, fx.field.one());
  unpinned.second_sig[0] ^= 0x10;
  CHECK_FALSE(ca_adjudicate_fraud(unpinned, fx.keys[1].public_key, fx.ca.public_key,
                                  *fx.scheme)
                  .guilty);
}

TEST_CASE("non-repudiation across tampering members") {
  // Every scalar-tampering member that signs its outgoing message correctly
  // is convicted from the newcomer's fraud proof.
  ProtocolFixture fx(SchemeKind::KeyedHash, 8);
  for (std::uint32_t i = 0; i < 8; ++i) {
    SignedShardMessage msg = fx.honest_message(i);
    msg.scalar = fx.field.add(msg.scalar, {static_cast<std::uint64_t>(i + 1)});
    msg.payload.x = msg.scalar;
    auto v = newcomer_verify_message(msg, fx.keys[i].public_key, fx.ca.public_key,
                                     *fx.scheme);
    REQUIRE(v.kind == VerdictKind::FraudProof);
    Adjudication adj = ca_adjudicate_fraud(*v.fraud_proof, fx.keys[i].public_key,
                                           fx.ca.public_key, *fx.scheme);
    CHECK(adj.guilty);
    CHECK(adj.node_id == i);
  }
}

TEST_CASE("wire layout is byte-exact") {
  ProtocolFixture fx(SchemeKind::KeyedHash);
  SignedShardMessage msg = fx.honest_message(0);
  WireFormat wf{8, 256};
  Bytes wire = serialize_message(msg, wf);
  const std::size_t L = msg.payload.values.size();
  REQUIRE(wire.size() == 4 + 8 + 256 + 256 + 8 + 8 * L);
  CHECK(wire.size() == wire_message_size(wf, L));

  // sender id, big-endian.
  CHECK(wire[3] == msg.sender_id);
  // scalar big-endian at offset 4.
  std::uint64_t scalar = 0;
  for (int k = 0; k < 8; ++k) scalar = (scalar << 8) | wire[4 + k];
  CHECK(scalar == msg.scalar.value);
  // first signature at offset 12, zero padding after 32 meaningful bytes.
  CHECK(Bytes(wire.begin() + 12, wire.begin() + 12 + 32) == msg.first_sig);
  for (std::size_t k = 32; k < 256; ++k) CHECK(wire[12 + k] == 0);
  // payload length field.
  std::uint64_t plen = 0;
  for (int k = 0; k < 8; ++k) plen = (plen << 8) | wire[4 + 8 + 512 + k];
  CHECK(plen == 8 * L);

  SignedShardMessage back = parse_message(wire, wf, fx.scheme->signature_size());
  CHECK(back.sender_id == msg.sender_id);
  CHECK(back.scalar == msg.scalar);
  CHECK(back.first_sig == msg.first_sig);
  CHECK(back.second_sig == msg.second_sig);
  CHECK(back.payload.values == msg.payload.values);
  CHECK(back.payload.x == msg.scalar);
}

TEST_CASE("wire round trip is identity over random messages") {
  ProtocolFixture fx(SchemeKind::KeyedHash, 6);
  Rng rng(71);
  WireFormat wf{8, 256};
  for (int iter = 0; iter < 200; ++iter) {
    auto node = static_cast<std::uint32_t>(rng.below(6));
    CodedShard coded{fx.identities[node].scalar, {}};
    const std::uint64_t L = rng.below(20);
    for (std::uint64_t l = 0; l < L; ++l)
      coded.values.push_back(fx.field.from_u64(rng.next_u64()));
    SignedShardMessage msg = member_build_message(fx.identities[node],
                                                  fx.keys[node].secret_key, coded,
                                                  *fx.scheme);
    Bytes wire = serialize_message(msg, wf);
    SignedShardMessage back = parse_message(wire, wf, fx.scheme->signature_size());
    CHECK(back.sender_id == msg.sender_id);
    CHECK(back.scalar == msg.scalar);
    CHECK(back.first_sig == msg.first_sig);
    CHECK(back.second_sig == msg.second_sig);
    CHECK(back.payload.values == msg.payload.values);
  }
}

TEST_CASE("wire errors") {
  ProtocolFixture fx(SchemeKind::KeyedHash);
  SignedShardMessage msg = fx.honest_message(0);

  // Scalar wider than the configured width.
  CHECK_THROWS_AS(serialize_message(msg, WireFormat{1, 256}), WireError);

  // Signature wider than the configured field.
  CHECK_THROWS_AS(serialize_message(msg, WireFormat{8, 16}), WireError);

  WireFormat wf{8, 64};
  Bytes wire = serialize_message(msg, wf);
  Bytes truncated(wire.begin(), wire.begin() + 10);
  CHECK_THROWS_AS(parse_message(truncated, wf, 32), WireError);

  Bytes padded = wire;
  padded[12 + 40] = 0x77;  // nonzero padding inside the first signature field
  CHECK_THROWS_AS(parse_message(padded, wf, 32), WireError);

  Bytes extended = wire;
  extended.push_back(0);
  CHECK_THROWS_AS(parse_message(extended, wf, 32), WireError);
}

TEST_CASE("one-byte scalars serialize on small fields") {
  Field f(11, 0);
  auto scheme = make_scheme(SchemeKind::KeyedHash);
  Rng rng(4);
  KeyPair ca = scheme->keygen(rng);
  auto identities = ca_init_committee(3, f, ca, *scheme, rng);
  KeyPair node = scheme->keygen(rng);
  CodedShard coded{identities[0].scalar, {{7}}};
  SignedShardMessage msg =
      member_build_message(identities[0], node.secret_key, coded, *scheme);
  WireFormat wf{1, 256};
  Bytes wire = serialize_message(msg, wf);
  CHECK(wire.size() == 4 + 1 + 512 + 8 + 8);
  SignedShardMessage back = parse_message(wire, wf, scheme->signature_size());
  CHECK(back.scalar == msg.scalar);
}
