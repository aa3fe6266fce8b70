#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "specagg/common.hpp"

namespace specagg {

using Bytes = std::vector<u8>;

struct KeyPair {
    Bytes pk;
    Bytes sk;  // never leaves the owning party; protocol messages carry pk only
};

// Key agreement + authenticated encryption behind one interface.
//
// `system` is X25519 with the shared secret hashed to a 256-bit key, and
// ChaCha20-Poly1305 for AEAD (OpenSSL).  `deterministic` is a
// simulation-only test double: Diffie-Hellman in a small 61-bit prime group
// and a keyed-PRF stream cipher with a 128-bit mixing tag, fully
// reproducible from the caller's RNG.  It is NOT secure and exists so
// protocol traces replay byte-exactly.
class CryptoSuite {
public:
    virtual ~CryptoSuite() = default;

    virtual KeyPair generate(Rng& rng) const = 0;
    // 32-byte shared key; agree(sk_i, pk_j) == agree(sk_j, pk_i).
    // Throws invalid_key on malformed public key bytes.
    virtual Bytes agree(const Bytes& sk, const Bytes& pk) const = 0;

    virtual Bytes aead_seal(const Bytes& key, std::span<const u8> nonce, std::span<const u8> aad,
                            std::span<const u8> plaintext) const = 0;
    // nullopt on any authentication failure (wrong key, tampered bytes).
    virtual std::optional<Bytes> aead_open(const Bytes& key, std::span<const u8> nonce,
                                           std::span<const u8> aad,
                                           std::span<const u8> ciphertext) const = 0;

    static constexpr size_t key_bytes = 32;
    static constexpr size_t nonce_bytes = 12;
    static constexpr size_t tag_bytes = 16;

    static std::unique_ptr<CryptoSuite> system();
    static std::unique_ptr<CryptoSuite> deterministic();
};

// Wire frame for an encrypted share message:
//
//   sender(4, LE) | receiver(4, LE) | nonce(12) | body | tag(16)
//
// sender and receiver ride as associated data; the nonce is a little-endian
// per-(sender,receiver) message counter starting at 0 (one counter per
// directed pair, so distinct messages on a pair never reuse a nonce).
Bytes seal_framed(const CryptoSuite& suite, const Bytes& key, u32 sender, u32 receiver,
                  u64 counter, std::span<const u8> plaintext);

struct FramedMessage {
    u32 sender = 0;
    u32 receiver = 0;
    Bytes plaintext;
};

// Parses and decrypts; nullopt if the frame is malformed or fails to
// authenticate under `key`.
std::optional<FramedMessage> open_framed(const CryptoSuite& suite, const Bytes& key,
                                         std::span<const u8> framed);

}  // namespace specagg
