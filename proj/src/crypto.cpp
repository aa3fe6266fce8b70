#include "specagg/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <cstring>

namespace specagg {

namespace {

void put_u32(Bytes& out, u32 v) {
    out.push_back(u8(v));
    out.push_back(u8(v >> 8));
    out.push_back(u8(v >> 16));
    out.push_back(u8(v >> 24));
}

u32 get_u32(std::span<const u8> in) {
    return u32(in[0]) | u32(in[1]) << 8 | u32(in[2]) << 16 | u32(in[3]) << 24;
}

// ---- system suite: X25519 + ChaCha20-Poly1305 ----

struct PkeyDeleter {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct PctxDeleter {
    void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
};
struct CctxDeleter {
    void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using PctxPtr = std::unique_ptr<EVP_PKEY_CTX, PctxDeleter>;
using CctxPtr = std::unique_ptr<EVP_CIPHER_CTX, CctxDeleter>;

class SystemSuite final : public CryptoSuite {
public:
    KeyPair generate(Rng&) const override {
        PctxPtr ctx(EVP_PKEY_CTX_new_id(EVP_PKEY_X25519, nullptr));
        EVP_PKEY* raw = nullptr;
        if (!ctx || EVP_PKEY_keygen_init(ctx.get()) <= 0 || EVP_PKEY_keygen(ctx.get(), &raw) <= 0)
            fail(Err::invalid_key, "x25519: keygen failed");
        PkeyPtr key(raw);
        KeyPair kp;
        size_t len = 32;
        kp.pk.resize(len);
        EVP_PKEY_get_raw_public_key(key.get(), kp.pk.data(), &len);
        len = 32;
        kp.sk.resize(len);
        EVP_PKEY_get_raw_private_key(key.get(), kp.sk.data(), &len);
        return kp;
    }

    Bytes agree(const Bytes& sk, const Bytes& pk) const override {
        if (sk.size() != 32 || pk.size() != 32) fail(Err::invalid_key, "x25519: bad key length");
        PkeyPtr priv(EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr, sk.data(), sk.size()));
        PkeyPtr peer(EVP_PKEY_new_raw_public_key(EVP_PKEY_X25519, nullptr, pk.data(), pk.size()));
        if (!priv || !peer) fail(Err::invalid_key, "x25519: malformed key bytes");
        PctxPtr ctx(EVP_PKEY_CTX_new(priv.get(), nullptr));
        size_t len = 32;
        Bytes secret(len);
        if (!ctx || EVP_PKEY_derive_init(ctx.get()) <= 0 ||
            EVP_PKEY_derive_set_peer(ctx.get(), peer.get()) <= 0 ||
            EVP_PKEY_derive(ctx.get(), secret.data(), &len) <= 0)
            fail(Err::invalid_key, "x25519: derive failed");
        Bytes key(32);
        SHA256(secret.data(), len, key.data());
        return key;
    }

    Bytes aead_seal(const Bytes& key, std::span<const u8> nonce, std::span<const u8> aad,
                    std::span<const u8> plaintext) const override {
        CctxPtr c(EVP_CIPHER_CTX_new());
        Bytes out(plaintext.size() + tag_bytes);
        int n = 0;
        if (!c || EVP_EncryptInit_ex(c.get(), EVP_chacha20_poly1305(), nullptr, nullptr, nullptr) <= 0 ||
            EVP_CIPHER_CTX_ctrl(c.get(), EVP_CTRL_AEAD_SET_IVLEN, int(nonce.size()), nullptr) <= 0 ||
            EVP_EncryptInit_ex(c.get(), nullptr, nullptr, key.data(), nonce.data()) <= 0)
            fail(Err::invalid_key, "aead: init failed");
        if (!aad.empty() && EVP_EncryptUpdate(c.get(), nullptr, &n, aad.data(), int(aad.size())) <= 0)
            fail(Err::invalid_key, "aead: aad failed");
        int written = 0;
        if (!plaintext.empty()) {
            EVP_EncryptUpdate(c.get(), out.data(), &n, plaintext.data(), int(plaintext.size()));
            written = n;
        }
        EVP_EncryptFinal_ex(c.get(), out.data() + written, &n);
        EVP_CIPHER_CTX_ctrl(c.get(), EVP_CTRL_AEAD_GET_TAG, tag_bytes, out.data() + plaintext.size());
        return out;
    }

    std::optional<Bytes> aead_open(const Bytes& key, std::span<const u8> nonce,
                                   std::span<const u8> aad,
                                   std::span<const u8> ciphertext) const override {
        if (ciphertext.size() < tag_bytes) return std::nullopt;
        size_t body = ciphertext.size() - tag_bytes;
        CctxPtr c(EVP_CIPHER_CTX_new());
        int n = 0;
        if (!c || EVP_DecryptInit_ex(c.get(), EVP_chacha20_poly1305(), nullptr, nullptr, nullptr) <= 0 ||
            EVP_CIPHER_CTX_ctrl(c.get(), EVP_CTRL_AEAD_SET_IVLEN, int(nonce.size()), nullptr) <= 0 ||
            EVP_DecryptInit_ex(c.get(), nullptr, nullptr, key.data(), nonce.data()) <= 0)
            return std::nullopt;
        if (!aad.empty() && EVP_DecryptUpdate(c.get(), nullptr, &n, aad.data(), int(aad.size())) <= 0)
            return std::nullopt;
        Bytes out(body);
        int written = 0;
        if (body) {
            if (EVP_DecryptUpdate(c.get(), out.data(), &n, ciphertext.data(), int(body)) <= 0)
                return std::nullopt;
            written = n;
        }
        Bytes tag(ciphertext.end() - tag_bytes, ciphertext.end());
        if (EVP_CIPHER_CTX_ctrl(c.get(), EVP_CTRL_AEAD_SET_TAG, tag_bytes, tag.data()) <= 0)
            return std::nullopt;
        if (EVP_DecryptFinal_ex(c.get(), out.data() + written, &n) <= 0) return std::nullopt;
        return out;
    }
};

// ---- deterministic suite ----
//
// Diffie-Hellman in the multiplicative group mod a 61-bit prime, plus a
// splitmix-derived stream cipher with a 128-bit keyed mixing tag.
// Reproducible, symmetric, and utterly insecure; simulation only.

constexpr u64 kGroupP = 2305843009213693951ULL;  // 2^61 - 1, Mersenne prime
constexpr u64 kGroupG = 3;

u64 group_mul(u64 a, u64 b) { return u64(u128(a) * b % kGroupP); }

u64 group_pow(u64 a, u64 e) {
    u64 r = 1;
    while (e) {
        if (e & 1) r = group_mul(r, a);
        a = group_mul(a, a);
        e >>= 1;
    }
    return r;
}

Bytes u64_le(u64 v) {
    Bytes b(8);
    for (int i = 0; i < 8; ++i) b[i] = u8(v >> (8 * i));
    return b;
}

u64 le_u64(std::span<const u8> b) {
    u64 v = 0;
    for (int i = 0; i < 8; ++i) v |= u64(b[i]) << (8 * i);
    return v;
}

// expands (seed material) into bytes via splitmix
void prf_fill(u64 seed, std::span<u8> out) {
    u64 st = seed;
    size_t i = 0;
    while (i < out.size()) {
        u64 w = splitmix64(st);
        for (int k = 0; k < 8 && i < out.size(); ++k, ++i) out[i] = u8(w >> (8 * k));
    }
}

u64 absorb(u64 h, std::span<const u8> data) {
    u64 st = h;
    size_t i = 0;
    while (i < data.size()) {
        u64 w = 0;
        for (int k = 0; k < 8 && i < data.size(); ++k, ++i) w |= u64(data[i]) << (8 * k);
        st ^= w;
        st = splitmix64(st);
    }
    st ^= data.size();
    return splitmix64(st);
}

class DeterministicSuite final : public CryptoSuite {
public:
    KeyPair generate(Rng& rng) const override {
        u64 exp = rng.below(kGroupP - 2) + 1;
        KeyPair kp;
        kp.sk = u64_le(exp);
        kp.pk = u64_le(group_pow(kGroupG, exp));
        return kp;
    }

    Bytes agree(const Bytes& sk, const Bytes& pk) const override {
        if (sk.size() != 8 || pk.size() != 8) fail(Err::invalid_key, "dh: bad key length");
        u64 point = le_u64(pk);
        if (point == 0 || point >= kGroupP) fail(Err::invalid_key, "dh: point outside the group");
        u64 shared = group_pow(point, le_u64(sk));
        Bytes key(key_bytes);
        prf_fill(splitmix64(shared), key);
        return key;
    }

    Bytes aead_seal(const Bytes& key, std::span<const u8> nonce, std::span<const u8> aad,
                    std::span<const u8> plaintext) const override {
        u64 base = stream_seed(key, nonce);
        Bytes out(plaintext.size() + tag_bytes);
        Bytes stream(plaintext.size());
        prf_fill(base, stream);
        for (size_t i = 0; i < plaintext.size(); ++i) out[i] = plaintext[i] ^ stream[i];
        write_tag(base, aad, {out.data(), plaintext.size()}, {out.data() + plaintext.size(), tag_bytes});
        return out;
    }

    std::optional<Bytes> aead_open(const Bytes& key, std::span<const u8> nonce,
                                   std::span<const u8> aad,
                                   std::span<const u8> ciphertext) const override {
        if (ciphertext.size() < tag_bytes) return std::nullopt;
        size_t body = ciphertext.size() - tag_bytes;
        u64 base = stream_seed(key, nonce);
        u8 expect[tag_bytes];
        write_tag(base, aad, ciphertext.first(body), expect);
        if (std::memcmp(expect, ciphertext.data() + body, tag_bytes) != 0) return std::nullopt;
        Bytes out(body);
        Bytes stream(body);
        prf_fill(base, stream);
        for (size_t i = 0; i < body; ++i) out[i] = ciphertext[i] ^ stream[i];
        return out;
    }

private:
    static u64 stream_seed(const Bytes& key, std::span<const u8> nonce) {
        u64 h = absorb(0x6b657973u, key);
        return absorb(h, nonce);
    }

    static void write_tag(u64 base, std::span<const u8> aad, std::span<const u8> body,
                          std::span<u8> tag) {
        u64 h1 = absorb(base ^ 0xaadaadaadULL, aad);
        u64 h2 = absorb(h1, body);
        u64 lane2 = splitmix64(h2);
        for (int i = 0; i < 8; ++i) tag[i] = u8(h2 >> (8 * i));
        for (int i = 0; i < 8; ++i) tag[8 + i] = u8(lane2 >> (8 * i));
    }
};

}  // namespace

std::unique_ptr<CryptoSuite> CryptoSuite::system() { return std::make_unique<SystemSuite>(); }
std::unique_ptr<CryptoSuite> CryptoSuite::deterministic() {
    return std::make_unique<DeterministicSuite>();
}

Bytes seal_framed(const CryptoSuite& suite, const Bytes& key, u32 sender, u32 receiver,
                  u64 counter, std::span<const u8> plaintext) {
    Bytes aad;
    put_u32(aad, sender);
    put_u32(aad, receiver);
    Bytes nonce(CryptoSuite::nonce_bytes, 0);
    for (int i = 0; i < 8; ++i) nonce[i] = u8(counter >> (8 * i));
    Bytes frame = aad;
    frame.insert(frame.end(), nonce.begin(), nonce.end());
    Bytes sealed = suite.aead_seal(key, nonce, aad, plaintext);
    frame.insert(frame.end(), sealed.begin(), sealed.end());
    return frame;
}

std::optional<FramedMessage> open_framed(const CryptoSuite& suite, const Bytes& key,
                                         std::span<const u8> framed) {
    constexpr size_t header = 8 + CryptoSuite::nonce_bytes;
    if (framed.size() < header + CryptoSuite::tag_bytes) return std::nullopt;
    FramedMessage msg;
    msg.sender = get_u32(framed.subspan(0, 4));
    msg.receiver = get_u32(framed.subspan(4, 4));
    auto nonce = framed.subspan(8, CryptoSuite::nonce_bytes);
    auto aad = framed.subspan(0, 8);
    auto body = framed.subspan(header);
    auto opened = suite.aead_open(key, nonce, aad, body);
    if (!opened) return std::nullopt;
    msg.plaintext = std::move(*opened);
    return msg;
}

}  // namespace specagg
