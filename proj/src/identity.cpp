#include "recagt/identity.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <cstring>
#include <set>

namespace recagt {

namespace {

Bytes evp_digest(const EVP_MD* md, std::span<const std::uint8_t> msg) {
  Bytes out(static_cast<std::size_t>(EVP_MD_size(md)));
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, md, nullptr) != 1 ||
      EVP_DigestUpdate(ctx, msg.data(), msg.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, out.data(), &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("digest computation failed");
  }
  EVP_MD_CTX_free(ctx);
  out.resize(len);
  return out;
}

std::string to_hex(const Bytes& b) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(b.size() * 2);
  for (auto c : b) {
    s.push_back(digits[c >> 4]);
    s.push_back(digits[c & 0xf]);
  }
  return s;
}

void put_u32_be(Bytes& out, std::uint32_t v) {
  for (int k = 3; k >= 0; --k) out.push_back(static_cast<std::uint8_t>((v >> (8 * k)) & 0xff));
}

void put_u64_be(Bytes& out, std::uint64_t v) {
  for (int k = 7; k >= 0; --k) out.push_back(static_cast<std::uint8_t>((v >> (8 * k)) & 0xff));
}

}  // namespace

Bytes sha256(std::span<const std::uint8_t> msg) { return evp_digest(EVP_sha256(), msg); }

Bytes md5(std::span<const std::uint8_t> msg) { return evp_digest(EVP_md5(), msg); }

// ---------------------------------------------------------------------------
// Ed25519 via OpenSSL, private keys derived from the caller's RNG so that
// committee construction replays deterministically under a fixed seed.
// ---------------------------------------------------------------------------

KeyPair Ed25519Scheme::keygen(Rng& rng) {
  Bytes seed(32);
  for (std::size_t i = 0; i < seed.size(); i += 8) {
    std::uint64_t v = rng.next_u64();
    for (std::size_t k = 0; k < 8 && i + k < seed.size(); ++k)
      seed[i + k] = static_cast<std::uint8_t>((v >> (8 * k)) & 0xff);
  }
  EVP_PKEY* key = EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(),
                                               seed.size());
  if (key == nullptr) throw MalformedKey("ed25519 key derivation failed");
  Bytes pub(32);
  std::size_t publen = pub.size();
  if (EVP_PKEY_get_raw_public_key(key, pub.data(), &publen) != 1) {
    EVP_PKEY_free(key);
    throw MalformedKey("ed25519 public key extraction failed");
  }
  EVP_PKEY_free(key);
  pub.resize(publen);
  return {seed, pub};
}

Bytes Ed25519Scheme::sign(std::span<const std::uint8_t> msg, const Bytes& secret_key) const {
  if (secret_key.size() != 32) throw MalformedKey("ed25519 secret key must be 32 bytes");
  EVP_PKEY* key = EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                               secret_key.data(), secret_key.size());
  if (key == nullptr) throw MalformedKey("ed25519 secret key rejected");
  Bytes sig(64);
  std::size_t siglen = sig.size();
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  bool ok = ctx != nullptr &&
            EVP_DigestSignInit(ctx, nullptr, nullptr, nullptr, key) == 1 &&
            EVP_DigestSign(ctx, sig.data(), &siglen, msg.data(), msg.size()) == 1;
  EVP_MD_CTX_free(ctx);
  EVP_PKEY_free(key);
  if (!ok) throw Error("ed25519 signing failed");
  sig.resize(siglen);
  return sig;
}

bool Ed25519Scheme::verify(std::span<const std::uint8_t> sig, std::span<const std::uint8_t> msg,
                           const Bytes& public_key) const {
  if (public_key.size() != 32) throw MalformedKey("ed25519 public key must be 32 bytes");
  if (sig.size() != 64) return false;
  EVP_PKEY* key = EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, public_key.data(),
                                              public_key.size());
  if (key == nullptr) throw MalformedKey("ed25519 public key rejected");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  bool ok = ctx != nullptr &&
            EVP_DigestVerifyInit(ctx, nullptr, nullptr, nullptr, key) == 1 &&
            EVP_DigestVerify(ctx, sig.data(), sig.size(), msg.data(), msg.size()) == 1;
  EVP_MD_CTX_free(ctx);
  EVP_PKEY_free(key);
  return ok;
}

// ---------------------------------------------------------------------------
// Keyed-hash test scheme. The "public key" is a hash tag of the secret key;
// verification resolves the tag back to the secret through the registry.
// ---------------------------------------------------------------------------

namespace {

Bytes hmac_sha256(const Bytes& key, std::span<const std::uint8_t> msg) {
  Bytes out(32);
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), msg.data(), msg.size(),
           out.data(), &len) == nullptr) {
    throw Error("hmac computation failed");
  }
  out.resize(len);
  return out;
}

}  // namespace

KeyPair KeyedHashScheme::keygen(Rng& rng) {
  Bytes secret(32);
  for (std::size_t i = 0; i < secret.size(); i += 8) {
    std::uint64_t v = rng.next_u64();
    for (std::size_t k = 0; k < 8 && i + k < secret.size(); ++k)
      secret[i + k] = static_cast<std::uint8_t>((v >> (8 * k)) & 0xff);
  }
  Bytes pub = sha256(secret);
  registry_[to_hex(pub)] = secret;
  return {secret, pub};
}

Bytes KeyedHashScheme::sign(std::span<const std::uint8_t> msg, const Bytes& secret_key) const {
  if (secret_key.size() != 32) throw MalformedKey("keyed-hash secret key must be 32 bytes");
  return hmac_sha256(secret_key, msg);
}

bool KeyedHashScheme::verify(std::span<const std::uint8_t> sig, std::span<const std::uint8_t> msg,
                             const Bytes& public_key) const {
  if (public_key.size() != 32) throw MalformedKey("keyed-hash public key must be 32 bytes");
  auto it = registry_.find(to_hex(public_key));
  if (it == registry_.end()) throw MalformedKey("public key not issued by this scheme");
  Bytes expect = hmac_sha256(it->second, msg);
  return sig.size() == expect.size() &&
         std::equal(sig.begin(), sig.end(), expect.begin());
}

std::unique_ptr<SignatureScheme> make_scheme(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::KeyedHash: return std::make_unique<KeyedHashScheme>();
    case SchemeKind::Ed25519: return std::make_unique<Ed25519Scheme>();
  }
  throw InvalidParams("unknown signature scheme");
}

// ---------------------------------------------------------------------------
// Protocol operations.
// ---------------------------------------------------------------------------

Bytes scalar_binding(FieldElement scalar, std::uint32_t node_id) {
  Bytes out;
  out.reserve(12);
  put_u64_be(out, scalar.value);
  put_u32_be(out, node_id);
  return out;
}

std::vector<NodeIdentity> ca_init_committee(std::uint32_t n, const Field& field,
                                            const KeyPair& ca_keys,
                                            SignatureScheme& scheme, Rng& rng) {
  if (n >= field.modulus())
    throw CommitteeTooLarge("committee size must be below the field modulus");
  std::set<std::uint64_t> used;
  std::vector<NodeIdentity> out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint64_t v;
    do {
      v = 1 + rng.below(field.modulus() - 1);  // nonzero scalar
    } while (!used.insert(v).second);
    NodeIdentity ident;
    ident.node_id = i;
    ident.scalar = {v};
    ident.ca_signature = scheme.sign(scalar_binding(ident.scalar, i), ca_keys.secret_key);
    out.push_back(std::move(ident));
  }
  return out;
}

ScalarCheck member_verify_scalar(const NodeIdentity& ident, const Bytes& ca_public_key,
                                 const SignatureScheme& scheme) {
  Bytes msg = scalar_binding(ident.scalar, ident.node_id);
  return scheme.verify(ident.ca_signature, msg, ca_public_key) ? ScalarCheck::Accept
                                                               : ScalarCheck::ResendRequest;
}

SignedShardMessage member_build_message(const NodeIdentity& ident, const Bytes& secret_key,
                                        const CodedShard& coded,
                                        const SignatureScheme& scheme) {
  SignedShardMessage msg;
  msg.sender_id = ident.node_id;
  msg.scalar = ident.scalar;
  msg.first_sig = ident.ca_signature;
  msg.second_sig = scheme.sign(msg.first_sig, secret_key);
  msg.payload = coded;
  msg.payload.x = ident.scalar;
  return msg;
}

VerificationVerdict newcomer_verify_message(const SignedShardMessage& msg,
                                            const Bytes& sender_public_key,
                                            const Bytes& ca_public_key,
                                            const SignatureScheme& scheme) {
  const bool second_ok = scheme.verify(msg.second_sig, msg.first_sig, sender_public_key);
  const bool first_ok =
      scheme.verify(msg.first_sig, scalar_binding(msg.scalar, msg.sender_id), ca_public_key);
  if (second_ok && first_ok) return {VerdictKind::Accept, std::nullopt};
  if (!second_ok) return {VerdictKind::Resend, std::nullopt};
  return {VerdictKind::FraudProof, msg};
}

Adjudication ca_adjudicate_fraud(const SignedShardMessage& proof,
                                 const Bytes& sender_public_key,
                                 const Bytes& ca_public_key,
                                 const SignatureScheme& scheme) {
  const bool sender_authenticated =
      scheme.verify(proof.second_sig, proof.first_sig, sender_public_key);
  const bool scalar_consistent =
      scheme.verify(proof.first_sig, scalar_binding(proof.scalar, proof.sender_id),
                    ca_public_key);
  if (sender_authenticated && !scalar_consistent) return {true, proof.sender_id};
  return {false, 0};
}

// ---------------------------------------------------------------------------
// Wire serialization.
// ---------------------------------------------------------------------------

std::uint64_t wire_message_size(const WireFormat& wf, std::uint64_t value_count) {
  return 4 + wf.scalar_bytes + 2ull * wf.signature_bytes + 8 + 8 * value_count;
}

Bytes serialize_message(const SignedShardMessage& msg, const WireFormat& wf) {
  if (wf.scalar_bytes == 0 || wf.scalar_bytes > 8)
    throw WireError("scalar width must be between 1 and 8 bytes");
  if (wf.scalar_bytes < 8 &&
      msg.scalar.value >= (std::uint64_t{1} << (8 * wf.scalar_bytes)))
    throw WireError("scalar does not fit the configured width");
  if (msg.first_sig.size() > wf.signature_bytes ||
      msg.second_sig.size() > wf.signature_bytes)
    throw WireError("signature exceeds the configured width");

  Bytes out;
  out.reserve(wire_message_size(wf, msg.payload.values.size()));
  put_u32_be(out, msg.sender_id);
  for (std::uint32_t k = wf.scalar_bytes; k-- > 0;)
    out.push_back(static_cast<std::uint8_t>((msg.scalar.value >> (8 * k)) & 0xff));
  auto put_sig = [&](const Bytes& sig) {
    out.insert(out.end(), sig.begin(), sig.end());
    out.resize(out.size() + (wf.signature_bytes - sig.size()), 0);
  };
  put_sig(msg.first_sig);
  put_sig(msg.second_sig);
  put_u64_be(out, 8ull * msg.payload.values.size());
  for (const auto& v : msg.payload.values) put_u64_be(out, v.value);
  return out;
}

SignedShardMessage parse_message(std::span<const std::uint8_t> data, const WireFormat& wf,
                                 std::size_t signature_size) {
  if (signature_size > wf.signature_bytes)
    throw WireError("signature size exceeds the configured width");
  const std::uint64_t head = 4ull + wf.scalar_bytes + 2ull * wf.signature_bytes + 8;
  if (data.size() < head) throw WireError("message shorter than its fixed header");

  std::size_t off = 0;
  auto take_be = [&](std::size_t width) {
    std::uint64_t v = 0;
    for (std::size_t k = 0; k < width; ++k) v = (v << 8) | data[off++];
    return v;
  };

  SignedShardMessage msg;
  msg.sender_id = static_cast<std::uint32_t>(take_be(4));
  msg.scalar = {take_be(wf.scalar_bytes)};
  auto take_sig = [&]() {
    Bytes sig(data.begin() + static_cast<std::ptrdiff_t>(off),
              data.begin() + static_cast<std::ptrdiff_t>(off + signature_size));
    for (std::size_t k = signature_size; k < wf.signature_bytes; ++k) {
      if (data[off + k] != 0) throw WireError("nonzero padding in signature field");
    }
    off += wf.signature_bytes;
    return sig;
  };
  msg.first_sig = take_sig();
  msg.second_sig = take_sig();
  const std::uint64_t payload_len = take_be(8);
  if (payload_len % 8 != 0) throw WireError("payload length must be a multiple of 8");
  if (data.size() - off != payload_len) throw WireError("payload length mismatch");
  msg.payload.x = msg.scalar;
  msg.payload.values.reserve(payload_len / 8);
  for (std::uint64_t i = 0; i < payload_len / 8; ++i) msg.payload.values.push_back({take_be(8)});
  return msg;
}

}  // namespace recagt
