#include "specagg/protocol.hpp"

#include <algorithm>

namespace specagg {

void ProtocolConfig::validate(const Scheme& scheme) const {
    if (input_len < 1) fail(Err::config_error, "protocol: input length must be >= 1");
    if (input_range < 2) fail(Err::config_error, "protocol: input range must be >= 2");
    u128 worst = u128(scheme.size()) * (input_range - 1);
    if (worst >= scheme.field().q())
        fail(Err::config_error, "protocol: N*(R-1) must stay below q so integer sums are exact");
    u32 d = dropout_budget ? dropout_budget : scheme.derived().d_count;
    if (d >= scheme.size()) fail(Err::config_error, "protocol: dropout budget must be < N");
}

const char* abort_reason_name(AbortReason r) {
    switch (r) {
        case AbortReason::none: return "none";
        case AbortReason::too_few_clients_round0: return "too_few_clients_round0";
        case AbortReason::too_few_clients_round1: return "too_few_clients_round1";
        case AbortReason::too_few_clients_round2: return "too_few_clients_round2";
        case AbortReason::auth_failure: return "auth_failure";
        case AbortReason::recon_failed: return "recon_failed";
    }
    return "unknown";
}

// ---- binary encoding ----

namespace {

void put_u8(Bytes& b, u8 v) { b.push_back(v); }
void put_u32(Bytes& b, u32 v) {
    for (int i = 0; i < 4; ++i) b.push_back(u8(v >> (8 * i)));
}
void put_u64(Bytes& b, u64 v) {
    for (int i = 0; i < 8; ++i) b.push_back(u8(v >> (8 * i)));
}
void put_bytes(Bytes& b, const Bytes& v) {
    put_u32(b, u32(v.size()));
    b.insert(b.end(), v.begin(), v.end());
}

struct Reader {
    std::span<const u8> buf;
    size_t pos = 0;
    u8 u8v() {
        need(1);
        return buf[pos++];
    }
    u32 u32v() {
        need(4);
        u32 v = 0;
        for (int i = 0; i < 4; ++i) v |= u32(buf[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    u64 u64v() {
        need(8);
        u64 v = 0;
        for (int i = 0; i < 8; ++i) v |= u64(buf[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
    Bytes bytes() {
        u32 n = u32v();
        need(n);
        Bytes v(buf.begin() + pos, buf.begin() + pos + n);
        pos += n;
        return v;
    }
    void need(size_t n) const {
        if (pos + n > buf.size()) fail(Err::io_error, "message decode: truncated buffer");
    }
    void done() const {
        if (pos != buf.size()) fail(Err::io_error, "message decode: trailing bytes");
    }
};

enum : u8 {
    kTagAdvertise = 0,
    kTagKeyList = 1,
    kTagBatch = 2,
    kTagDelivery = 3,
    kTagSumShare = 4,
    kTagAbort = 5,
};

}  // namespace

u32 message_round(const Message& m) {
    switch (m.index()) {
        case 0:
        case 1: return 0;
        case 2:
        case 3: return 1;
        case 4: return 2;
        default: return std::get<AbortNotice>(m).round;
    }
}

u32 message_sender(const Message& m) {
    switch (m.index()) {
        case 0: return std::get<AdvertiseKey>(m).sender;
        case 2: return std::get<CipherBatch>(m).sender;
        case 4: return std::get<SumShare>(m).sender;
        default: return kServerId;
    }
}

Bytes encode_message(const Message& m) {
    Bytes b;
    put_u8(b, u8(m.index()));
    put_u8(b, u8(message_round(m)));
    put_u32(b, message_sender(m));
    switch (m.index()) {
        case kTagAdvertise: {
            put_bytes(b, std::get<AdvertiseKey>(m).pk);
            break;
        }
        case kTagKeyList: {
            const auto& v = std::get<KeyList>(m);
            put_u32(b, u32(v.keys.size()));
            for (const auto& [id, pk] : v.keys) {
                put_u32(b, id);
                put_bytes(b, pk);
            }
            break;
        }
        case kTagBatch: {
            const auto& v = std::get<CipherBatch>(m);
            put_u32(b, u32(v.ciphertexts.size()));
            for (const auto& [to, frame] : v.ciphertexts) {
                put_u32(b, to);
                put_bytes(b, frame);
            }
            break;
        }
        case kTagDelivery: {
            const auto& v = std::get<CipherDelivery>(m);
            put_u32(b, v.receiver);
            put_u32(b, u32(v.frames.size()));
            for (const auto& frame : v.frames) put_bytes(b, frame);
            break;
        }
        case kTagSumShare: {
            const auto& v = std::get<SumShare>(m);
            put_u32(b, u32(v.sums.size()));
            for (u64 s : v.sums) put_u64(b, s);
            break;
        }
        case kTagAbort: {
            const auto& v = std::get<AbortNotice>(m);
            put_u8(b, u8(v.reason));
            put_u8(b, u8(v.round));
            break;
        }
    }
    return b;
}

Message decode_message(std::span<const u8> buf) {
    Reader r{buf};
    u8 tag = r.u8v();
    u8 round = r.u8v();
    u32 sender = r.u32v();
    Message out;
    switch (tag) {
        case kTagAdvertise: {
            AdvertiseKey m{sender, r.bytes()};
            out = std::move(m);
            break;
        }
        case kTagKeyList: {
            KeyList m;
            u32 n = r.u32v();
            for (u32 i = 0; i < n; ++i) {
                u32 id = r.u32v();
                m.keys.emplace_back(id, r.bytes());
            }
            out = std::move(m);
            break;
        }
        case kTagBatch: {
            CipherBatch m;
            m.sender = sender;
            u32 n = r.u32v();
            for (u32 i = 0; i < n; ++i) {
                u32 to = r.u32v();
                m.ciphertexts.emplace_back(to, r.bytes());
            }
            out = std::move(m);
            break;
        }
        case kTagDelivery: {
            CipherDelivery m;
            m.receiver = r.u32v();
            u32 n = r.u32v();
            for (u32 i = 0; i < n; ++i) m.frames.push_back(r.bytes());
            out = std::move(m);
            break;
        }
        case kTagSumShare: {
            SumShare m;
            m.sender = sender;
            u32 n = r.u32v();
            for (u32 i = 0; i < n; ++i) m.sums.push_back(r.u64v());
            out = std::move(m);
            break;
        }
        case kTagAbort: {
            AbortNotice m;
            m.reason = AbortReason(r.u8v());
            m.round = r.u8v();
            out = std::move(m);
            break;
        }
        default: fail(Err::io_error, "message decode: unknown tag");
    }
    r.done();
    if (round != message_round(out)) fail(Err::io_error, "message decode: round tag mismatch");
    return out;
}

// ---- client ----

Client::Client(u32 id, const Scheme& scheme, const ProtocolConfig& cfg, const CryptoSuite& suite,
               std::vector<u64> input, Rng rng)
    : id_(id), scheme_(&scheme), cfg_(&cfg), suite_(&suite), input_(std::move(input)), rng_(rng) {
    cfg.validate(scheme);
    if (id >= scheme.size()) fail(Err::out_of_range, "client: id out of range");
    if (input_.size() != cfg.input_len) fail(Err::length_mismatch, "client: wrong input length");
    for (u64 v : input_)
        if (v >= cfg.input_range) fail(Err::out_of_range, "client: input outside [0, R)");
}

void Client::abort_with(AbortReason reason, u32 round, const std::string& what) {
    phase_ = ClientPhase::aborted;
    throw ProtocolAbort(reason, round, what);
}

AdvertiseKey Client::round0() {
    if (phase_ != ClientPhase::round0) fail(Err::config_error, "client: not in round 0");
    keypair_ = suite_->generate(rng_);
    phase_ = ClientPhase::round1;
    return AdvertiseKey{id_, keypair_.pk};
}

CipherBatch Client::round1(const KeyList& list) {
    if (phase_ != ClientPhase::round1) fail(Err::config_error, "client: not in round 1");
    const u32 n = scheme_->size();
    const u32 need = n - cfg_->budget(*scheme_);
    if (list.keys.size() < need)
        abort_with(AbortReason::too_few_clients_round0, 1, "client: |C0| < N - D");
    peer_pks_.clear();
    for (const auto& [cid, pk] : list.keys) {
        if (cid >= n) fail(Err::out_of_range, "client: key list id out of range");
        peer_pks_[cid] = pk;
    }
    if (!peer_pks_.count(id_)) abort_with(AbortReason::too_few_clients_round0, 1, "client: not in C0");

    // share each input block with independent randomness
    const u32 s_count = scheme_->derived().s_count;
    const u32 blocks = cfg_->blocks(s_count);
    std::vector<std::vector<u64>> spectra;
    spectra.reserve(blocks);
    for (u32 l = 0; l < blocks; ++l) {
        u32 lo = l * s_count;
        u32 hi = std::min<u32>(lo + s_count, cfg_->input_len);
        std::vector<u64> block(input_.begin() + lo, input_.begin() + hi);
        spectra.push_back(share(block, *scheme_, rng_).values);
    }

    own_tuple_.resize(blocks);
    for (u32 l = 0; l < blocks; ++l) own_tuple_[l] = spectra[l][id_];

    CipherBatch batch;
    batch.sender = id_;
    for (const auto& [cid, pk] : peer_pks_) {
        if (cid == id_) continue;
        std::vector<u64> tuple(blocks);
        for (u32 l = 0; l < blocks; ++l) tuple[l] = spectra[l][cid];
        Bytes plaintext;
        for (int i = 0; i < 4; ++i) plaintext.push_back(u8(id_ >> (8 * i)));
        for (int i = 0; i < 4; ++i) plaintext.push_back(u8(cid >> (8 * i)));
        for (u64 v : tuple)
            for (int i = 0; i < 8; ++i) plaintext.push_back(u8(v >> (8 * i)));
        Bytes key = suite_->agree(keypair_.sk, pk);
        u64& counter = nonce_counters_[{id_, cid}];
        batch.ciphertexts.emplace_back(cid, seal_framed(*suite_, key, id_, cid, counter++, plaintext));
    }
    phase_ = ClientPhase::round2;
    return batch;
}

SumShare Client::round2(const CipherDelivery& delivery) {
    if (phase_ != ClientPhase::round2) fail(Err::config_error, "client: not in round 2");
    if (delivery.receiver != id_) fail(Err::config_error, "client: delivery addressed elsewhere");
    const Field& F = scheme_->field();
    const u32 blocks = cfg_->blocks(scheme_->derived().s_count);

    std::vector<u64> sums = own_tuple_;  // own share is summed in locally
    std::set<u32> seen;
    for (const Bytes& frame : delivery.frames) {
        if (frame.size() < 8) abort_with(AbortReason::auth_failure, 2, "client: malformed frame");
        u32 claimed_sender = u32(frame[0]) | u32(frame[1]) << 8 | u32(frame[2]) << 16 | u32(frame[3]) << 24;
        auto it = peer_pks_.find(claimed_sender);
        if (it == peer_pks_.end() || claimed_sender == id_)
            abort_with(AbortReason::auth_failure, 2, "client: frame from outside C0");
        Bytes key = suite_->agree(keypair_.sk, it->second);
        auto opened = open_framed(*suite_, key, frame);
        if (!opened) abort_with(AbortReason::auth_failure, 2, "client: ciphertext failed to authenticate");
        // plaintext binds addressing: sender || receiver || tuple
        if (opened->plaintext.size() != 8 + size_t(blocks) * 8)
            abort_with(AbortReason::auth_failure, 2, "client: bad plaintext length");
        u32 ps = 0, pr = 0;
        for (int i = 0; i < 4; ++i) ps |= u32(opened->plaintext[i]) << (8 * i);
        for (int i = 0; i < 4; ++i) pr |= u32(opened->plaintext[4 + i]) << (8 * i);
        if (ps != claimed_sender || pr != id_ || opened->sender != claimed_sender ||
            opened->receiver != id_)
            abort_with(AbortReason::auth_failure, 2, "client: embedded ids do not match");
        if (!seen.insert(claimed_sender).second)
            abort_with(AbortReason::auth_failure, 2, "client: duplicate sender");
        for (u32 l = 0; l < blocks; ++l) {
            u64 v = 0;
            for (int i = 0; i < 8; ++i) v |= u64(opened->plaintext[8 + size_t(l) * 8 + i]) << (8 * i);
            if (v >= F.q()) abort_with(AbortReason::auth_failure, 2, "client: non-canonical share");
            sums[l] = F.add(sums[l], v);
        }
    }
    phase_ = ClientPhase::done;
    return SumShare{id_, std::move(sums)};
}

// ---- server ----

Server::Server(const Scheme& scheme, const ProtocolConfig& cfg) : scheme_(&scheme), cfg_(&cfg) {
    cfg.validate(scheme);
}

void Server::receive(const AdvertiseKey& msg) {
    if (round_ != 0) fail(Err::config_error, "server: round 0 is over");
    if (msg.sender >= scheme_->size()) fail(Err::out_of_range, "server: bad sender id");
    if (c0_.insert(msg.sender).second) keys_.emplace_back(msg.sender, msg.pk);
}

KeyList Server::finish_round0() {
    if (round_ != 0) fail(Err::config_error, "server: round 0 is over");
    const u32 need = scheme_->size() - cfg_->budget(*scheme_);
    if (c0_.size() < need)
        throw ProtocolAbort(AbortReason::too_few_clients_round0, 0, "server: |C0| < N - D");
    round_ = 1;
    std::sort(keys_.begin(), keys_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return KeyList{keys_};
}

void Server::receive(const CipherBatch& msg) {
    if (round_ != 1) fail(Err::config_error, "server: not collecting round 1");
    if (!c0_.count(msg.sender)) fail(Err::config_error, "server: round-1 sender not in C0");
    if (!c1_.insert(msg.sender).second) return;  // duplicate batch ignored
    for (const auto& [receiver, frame] : msg.ciphertexts)
        mailbox_[receiver].emplace_back(msg.sender, frame);
}

std::vector<CipherDelivery> Server::finish_round1() {
    if (round_ != 1) fail(Err::config_error, "server: not collecting round 1");
    const u32 need = scheme_->size() - cfg_->budget(*scheme_);
    if (c1_.size() < need)
        throw ProtocolAbort(AbortReason::too_few_clients_round1, 1, "server: |C1| < N - D");
    round_ = 2;
    std::vector<CipherDelivery> out;
    for (u32 id : c1_) {
        CipherDelivery d;
        d.receiver = id;
        for (const auto& [sender, frame] : mailbox_[id])
            if (c1_.count(sender)) d.frames.push_back(frame);  // prune C0 \ C1 senders
        out.push_back(std::move(d));
    }
    return out;
}

void Server::receive(const SumShare& msg) {
    if (round_ != 2) fail(Err::config_error, "server: not collecting round 2");
    if (!c1_.count(msg.sender)) fail(Err::config_error, "server: round-2 sender not in C1");
    if (msg.sums.size() != cfg_->blocks(scheme_->derived().s_count))
        fail(Err::length_mismatch, "server: sum-share has wrong block count");
    if (c2_.insert(msg.sender).second) sum_shares_[msg.sender] = msg.sums;
}

std::vector<u64> Server::finish_round2() {
    if (round_ != 2) fail(Err::config_error, "server: not collecting round 2");
    const u32 n = scheme_->size();
    const u32 need = n - cfg_->budget(*scheme_);
    if (c2_.size() < need)
        throw ProtocolAbort(AbortReason::too_few_clients_round2, 2, "server: |C2| < N - D");

    const u32 blocks = cfg_->blocks(scheme_->derived().s_count);
    const u32 s_count = scheme_->derived().s_count;
    std::vector<u64> z;
    z.reserve(u64(blocks) * s_count);
    for (u32 l = 0; l < blocks; ++l) {
        std::vector<std::pair<u32, u64>> pairs;
        pairs.reserve(c2_.size());
        for (u32 id : c2_) pairs.emplace_back(id, sum_shares_[id][l]);
        auto block = reconstruct(Shares::from_pairs(pairs, n), *scheme_);
        if (!block)
            throw ProtocolAbort(AbortReason::recon_failed, 2,
                                "server: reconstruction returned bottom for block " + std::to_string(l));
        z.insert(z.end(), block->begin(), block->end());
    }
    z.resize(cfg_->input_len);  // drop the zero padding of the last block
    return z;
}

}  // namespace specagg
