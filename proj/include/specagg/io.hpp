#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>

#include "specagg/audit.hpp"
#include "specagg/layout.hpp"
#include "specagg/sharing.hpp"
#include "specagg/simnet.hpp"

namespace specagg {

using nlohmann::json;

// Parameter documents are versioned, canonical (sorted keys), and strict:
// unknown fields are rejected so typos cannot silently change a run.
inline constexpr const char* kParamsSchema = "specagg-params/1";
inline constexpr const char* kSimSchema = "specagg-sim/1";

json params_to_json(const Params& p);
Params params_from_json(const json& j);

json sets_to_json(const IndexSets& sets);

json sim_config_to_json(const SimConfig& cfg);
SimConfig sim_config_from_json(const json& j);

Params load_params_file(const std::filesystem::path& path);
SimConfig load_sim_file(const std::filesystem::path& path);
json load_json_file(const std::filesystem::path& path);
void save_text_file(const std::filesystem::path& path, const std::string& text);

// SHA-256 of the canonical parameter document; share files embed it so a
// file cannot be decoded against the wrong layout.
Bytes params_digest(const Params& p);

// Share file: "SAGG" | u16 version | u8 element width (8) | u8 reserved |
// 32-byte params digest | u32 n | erasure bitmap ceil(n/8) (bit set =
// erased) | u32 count (= n) | count x u64 little-endian values.
void write_share_file(const std::filesystem::path& path, const Shares& shares, const Params& p);
Shares read_share_file(const std::filesystem::path& path, const Params& p);

// Timings are wall-clock and not replayable, so they are off by default;
// everything else in the document is a pure function of (config, seed).
json trial_outcome_json(const TrialOutcome& o, bool with_timings = false);
json campaign_report_json(const CampaignReport& r);
std::string campaign_report_csv(const CampaignReport& r);

// Debug view of a recorded message trace (decoded headers + per-type
// summary); the binary trace itself is the byte-exact replay format.
json trace_to_json(const std::vector<Bytes>& trace);
void write_trace_file(const std::filesystem::path& path, const std::vector<Bytes>& trace);
std::vector<Bytes> read_trace_file(const std::filesystem::path& path);

json rank_audit_json(const RankAuditReport& r);
json bench_report_json(const BenchReport& r);
std::string bench_report_csv(const BenchReport& r);

}  // namespace specagg
