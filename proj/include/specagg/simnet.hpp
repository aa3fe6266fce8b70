#pragma once

#include <array>
#include <optional>

#include "specagg/protocol.hpp"
#include "specagg/shamir.hpp"

namespace specagg {

// Clients drop only at phase boundaries, never mid-message.
enum class DropPhase : u8 { after_round0_send = 0, after_round1_send = 1, after_round2_send = 2 };

struct DropoutSpec {
    DropPhase phase = DropPhase::after_round1_send;
    u32 count = 0;          // absolute count; if 0, fraction applies
    double fraction = 0.0;  // of N, floored
};

enum class InputGen : u8 { uniform = 0, constant = 1, file = 2 };

struct SimConfig {
    ProtocolConfig protocol;
    std::vector<DropoutSpec> dropouts;
    InputGen input_gen = InputGen::uniform;
    u64 constant_value = 1;
    std::vector<std::vector<u64>> file_inputs;  // N rows of L values when input_gen == file
    u32 trials = 1;
    u64 seed = 0;
    bool record_trace = false;
    bool use_system_crypto = false;  // true trades determinism for real primitives
    u32 tamper_frames = 0;           // fault injection: flip a byte in this many deliveries
    u32 threads = 0;                 // campaign parallelism; 0 = hardware

    u32 requested_dropouts(u32 n) const;
    void validate(const Scheme& scheme) const;
};

struct TrialOutcome {
    u32 c0 = 0, c1 = 0, c2 = 0;
    std::vector<u32> c0_ids, c1_ids, c2_ids;  // survivor memberships per round
    bool aborted = false;
    AbortReason abort_reason = AbortReason::none;
    u32 abort_round = 0;
    bool match = false;     // result == sum of C1 inputs (only when !aborted)
    bool overload = false;  // requested dropouts exceed the budget (labeled, still run)
    std::vector<u64> result;
    std::vector<u64> ground_truth;
    u64 client_tx_bytes = 0, client_rx_bytes = 0;
    u64 server_tx_bytes = 0, server_rx_bytes = 0;
    std::vector<u64> per_client_tx, per_client_rx;  // indexed by client id
    std::array<double, 3> round_ms{};  // wall time per round (not replayable)
    std::vector<Bytes> trace;          // encoded messages, when recording

    // Canonical bytes of the replayable fields (everything except timings).
    Bytes serialize() const;
};

// Uniform sample of `count` ids out of `pool`, without replacement.
std::vector<u32> sample_dropouts(const std::vector<u32>& pool, u32 count, Rng& rng);

TrialOutcome run_trial(const SimConfig& cfg, u64 seed);
TrialOutcome run_trial(const Scheme& scheme, const SimConfig& cfg, u64 seed);

struct CampaignReport {
    u32 trials = 0;
    u32 matches = 0;
    u32 aborts = 0;
    u32 mismatches = 0;
    bool overload = false;
    double success_rate = 0.0;
    double wilson_low = 0.0, wilson_high = 0.0;  // 95% interval
    std::array<double, 3> mean_round_ms{};
    std::array<double, 3> median_round_ms{};
    u64 total_client_tx = 0, total_server_tx = 0;
    // per-trial means, for eyeballing against the expected growth
    // (client ~ L + N elements, server ~ N times that)
    double client_tx_per_client_per_trial = 0.0;
    double server_tx_per_trial = 0.0;
    std::vector<u32> abort_rounds;  // one entry per aborted trial
};

CampaignReport run_campaign(const SimConfig& cfg);

// Server-side reconstruction timing over a ladder of sizes (one share block,
// a fixed spread-out erasure pattern, batch-repeated timing).  Ratios are
// medians of t(2N)/t(N) over consecutive doubling pairs.
struct BenchPoint {
    u32 n = 0;
    u64 q = 0;
    double fast_ms = 0.0;
    double shamir_ms = 0.0;
};

struct BenchReport {
    std::vector<BenchPoint> points;
    double fast_doubling_ratio = 0.0;
    double shamir_doubling_ratio = 0.0;
};

BenchReport bench_scaling(const std::vector<u32>& sizes, u32 dropouts = 8, u32 runs = 5);

// The default balanced, smooth, coprime ladder: 210 .. 13440.
std::vector<u32> bench_default_sizes();

}  // namespace specagg
