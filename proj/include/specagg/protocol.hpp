#pragma once

#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "specagg/crypto.hpp"
#include "specagg/layout.hpp"
#include "specagg/sharing.hpp"

namespace specagg {

// Three-round masked-sum aggregation.  Round 0 advertises encryption keys,
// round 1 distributes encrypted shares of every client's input, round 2
// collects plaintext sum-shares and the server reconstructs the sum.  Any
// client that reaches the server in round 1 contributes to the output, even
// if it later drops; clients that drop earlier are simply excluded.
struct ProtocolConfig {
    Params params;
    u32 input_len = 0;        // L
    u64 input_range = 0;      // R, inputs are integers in [0, R)
    u32 dropout_budget = 0;   // D; 0 means the layout's derived budget

    u32 blocks(u32 s_count) const { return (input_len + s_count - 1) / s_count; }
    void validate(const Scheme& scheme) const;
    u32 budget(const Scheme& scheme) const {
        return dropout_budget ? dropout_budget : scheme.derived().d_count;
    }
};

enum class AbortReason : u8 {
    none = 0,
    too_few_clients_round0,
    too_few_clients_round1,
    too_few_clients_round2,
    auth_failure,
    recon_failed,
};

const char* abort_reason_name(AbortReason r);

class ProtocolAbort : public Error {
public:
    ProtocolAbort(AbortReason reason, u32 round, const std::string& what)
        : Error(Err::config_error, what), reason_(reason), round_(round) {}
    AbortReason reason() const { return reason_; }
    u32 round() const { return round_; }

private:
    AbortReason reason_;
    u32 round_;
};

// ---- messages ----

constexpr u32 kServerId = 0xffffffffu;

struct AdvertiseKey {
    u32 sender = 0;
    Bytes pk;
};
struct KeyList {
    std::vector<std::pair<u32, Bytes>> keys;  // (client id, pk), ascending id
};
struct CipherBatch {
    u32 sender = 0;
    std::vector<std::pair<u32, Bytes>> ciphertexts;  // (receiver, frame)
};
struct CipherDelivery {
    u32 receiver = 0;
    std::vector<Bytes> frames;  // sender rides in each frame header
};
struct SumShare {
    u32 sender = 0;
    std::vector<u64> sums;  // one element per input block
};
struct AbortNotice {
    u32 round = 0;
    AbortReason reason = AbortReason::none;
};

using Message =
    std::variant<AdvertiseKey, KeyList, CipherBatch, CipherDelivery, SumShare, AbortNotice>;

// Canonical little-endian binary encoding (round tag, sender, payload);
// decode rejects malformed buffers with io_error.
Bytes encode_message(const Message& m);
Message decode_message(std::span<const u8> buf);
u32 message_round(const Message& m);
u32 message_sender(const Message& m);

// ---- client ----

enum class ClientPhase : u8 { round0, round1, round2, done, aborted };

class Client {
public:
    Client(u32 id, const Scheme& scheme, const ProtocolConfig& cfg, const CryptoSuite& suite,
           std::vector<u64> input, Rng rng);

    AdvertiseKey round0();
    CipherBatch round1(const KeyList& list);
    SumShare round2(const CipherDelivery& delivery);

    u32 id() const { return id_; }
    ClientPhase phase() const { return phase_; }
    const std::vector<u64>& input() const { return input_; }

private:
    [[noreturn]] void abort_with(AbortReason reason, u32 round, const std::string& what);

    u32 id_;
    const Scheme* scheme_;
    const ProtocolConfig* cfg_;
    const CryptoSuite* suite_;
    std::vector<u64> input_;
    Rng rng_;
    ClientPhase phase_ = ClientPhase::round0;

    KeyPair keypair_;
    std::map<u32, Bytes> peer_pks_;  // C0 as announced by the server
    std::vector<u64> own_tuple_;     // this client's share of its own input
    std::map<std::pair<u32, u32>, u64> nonce_counters_;
};

// ---- server ----

class Server {
public:
    Server(const Scheme& scheme, const ProtocolConfig& cfg);

    void receive(const AdvertiseKey& msg);
    KeyList finish_round0();

    void receive(const CipherBatch& msg);
    std::vector<CipherDelivery> finish_round1();

    void receive(const SumShare& msg);
    // Reconstructs per block and lifts to integer sums (exact, since
    // N*(R-1) < q); length input_len.
    std::vector<u64> finish_round2();

    const std::set<u32>& c0() const { return c0_; }
    const std::set<u32>& c1() const { return c1_; }
    const std::set<u32>& c2() const { return c2_; }

private:
    const Scheme* scheme_;
    const ProtocolConfig* cfg_;
    u32 round_ = 0;

    std::set<u32> c0_, c1_, c2_;
    std::vector<std::pair<u32, Bytes>> keys_;
    std::map<u32, std::vector<std::pair<u32, Bytes>>> mailbox_;  // receiver -> (sender, frame)
    std::map<u32, std::vector<u64>> sum_shares_;
};

}  // namespace specagg
