#include "specagg/io.hpp"

#include <openssl/sha.h>

#include <fstream>

namespace specagg {

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    if (!j.is_object()) fail(Err::config_error, std::string(where) + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed) ok |= (key == a);
        if (!ok) fail(Err::config_error, std::string(where) + ": unknown field '" + key + "'");
    }
}

template <typename T>
T get_req(const json& j, const char* key, const char* where) {
    if (!j.contains(key))
        fail(Err::config_error, std::string(where) + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(Err::config_error, std::string(where) + ": field '" + key + "' has the wrong type");
    }
}

template <typename T>
T get_opt(const json& j, const char* key, T fallback, const char* where) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(Err::config_error, std::string(where) + ": field '" + key + "' has the wrong type");
    }
}

}  // namespace

json params_to_json(const Params& p) {
    json j;
    j["schema"] = kParamsSchema;
    j["variant"] = p.variant == Variant::product_code ? "product" : "row";
    j["n0"] = p.n0;
    j["n1"] = p.n1;
    j["q"] = p.q;
    j["alpha"] = p.alpha.str();
    j["beta"] = p.beta.str();
    j["delta0"] = p.delta0.str();
    if (p.variant == Variant::product_code) j["delta1"] = p.delta1.str();
    if (p.peel_iters) j["peel_iters"] = p.peel_iters;
    return j;
}

Params params_from_json(const json& j) {
    check_keys(j, {"schema", "variant", "n0", "n1", "q", "alpha", "beta", "delta0", "delta1",
                   "peel_iters"},
               "params");
    auto schema = get_req<std::string>(j, "schema", "params");
    if (schema != kParamsSchema)
        fail(Err::config_error, "params: unsupported schema '" + schema + "'");
    Params p;
    auto variant = get_req<std::string>(j, "variant", "params");
    if (variant == "product")
        p.variant = Variant::product_code;
    else if (variant == "row")
        p.variant = Variant::row_code;
    else
        fail(Err::config_error, "params: variant must be 'product' or 'row'");
    p.n0 = get_req<u32>(j, "n0", "params");
    p.n1 = get_req<u32>(j, "n1", "params");
    p.q = get_opt<u64>(j, "q", 0, "params");
    p.alpha = Rational::parse(get_req<std::string>(j, "alpha", "params"));
    p.beta = Rational::parse(get_req<std::string>(j, "beta", "params"));
    p.delta0 = Rational::parse(get_req<std::string>(j, "delta0", "params"));
    if (p.variant == Variant::product_code)
        p.delta1 = Rational::parse(get_req<std::string>(j, "delta1", "params"));
    else if (j.contains("delta1"))
        p.delta1 = Rational::parse(get_req<std::string>(j, "delta1", "params"));
    p.peel_iters = get_opt<u32>(j, "peel_iters", 0, "params");
    if (p.q == 0) p.q = find_field(p.size(), 2 * u64(p.size()));
    return p;
}

json sets_to_json(const IndexSets& sets) {
    json j;
    j["z0"] = sets.z0;
    j["z1"] = sets.z1;
    j["secrets"] = sets.secrets;
    j["proof"] = sets.proof;
    j["masks"] = sets.free_masks;
    return j;
}

namespace {

const char* phase_name(DropPhase p) {
    switch (p) {
        case DropPhase::after_round0_send: return "after_round0_send";
        case DropPhase::after_round1_send: return "after_round1_send";
        case DropPhase::after_round2_send: return "after_round2_send";
    }
    return "?";
}

DropPhase phase_from(const std::string& s) {
    if (s == "after_round0_send") return DropPhase::after_round0_send;
    if (s == "after_round1_send") return DropPhase::after_round1_send;
    if (s == "after_round2_send") return DropPhase::after_round2_send;
    fail(Err::config_error, "sim: unknown dropout phase '" + s + "'");
}

}  // namespace

json sim_config_to_json(const SimConfig& cfg) {
    json j;
    j["schema"] = kSimSchema;
    j["params"] = params_to_json(cfg.protocol.params);
    j["input_len"] = cfg.protocol.input_len;
    j["input_range"] = cfg.protocol.input_range;
    if (cfg.protocol.dropout_budget) j["dropout_budget"] = cfg.protocol.dropout_budget;
    json drops = json::array();
    for (const auto& d : cfg.dropouts) {
        json e;
        e["phase"] = phase_name(d.phase);
        if (d.count)
            e["count"] = d.count;
        else
            e["fraction"] = d.fraction;
        drops.push_back(e);
    }
    j["dropouts"] = drops;
    j["input_gen"] = cfg.input_gen == InputGen::uniform    ? "uniform"
                     : cfg.input_gen == InputGen::constant ? "constant"
                                                           : "file";
    if (cfg.input_gen == InputGen::constant) j["constant_value"] = cfg.constant_value;
    if (cfg.input_gen == InputGen::file) j["inputs"] = cfg.file_inputs;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    if (cfg.record_trace) j["record_trace"] = true;
    if (cfg.use_system_crypto) j["use_system_crypto"] = true;
    if (cfg.tamper_frames) j["tamper_frames"] = cfg.tamper_frames;
    if (cfg.threads) j["threads"] = cfg.threads;
    return j;
}

SimConfig sim_config_from_json(const json& j) {
    check_keys(j,
               {"schema", "params", "input_len", "input_range", "dropout_budget", "dropouts",
                "input_gen", "constant_value", "inputs", "trials", "seed", "record_trace",
                "use_system_crypto", "tamper_frames", "threads"},
               "sim");
    auto schema = get_req<std::string>(j, "schema", "sim");
    if (schema != kSimSchema) fail(Err::config_error, "sim: unsupported schema '" + schema + "'");
    SimConfig cfg;
    cfg.protocol.params = params_from_json(get_req<json>(j, "params", "sim"));
    cfg.protocol.input_len = get_req<u32>(j, "input_len", "sim");
    cfg.protocol.input_range = get_req<u64>(j, "input_range", "sim");
    cfg.protocol.dropout_budget = get_opt<u32>(j, "dropout_budget", 0, "sim");
    if (j.contains("dropouts")) {
        for (const auto& e : j.at("dropouts")) {
            check_keys(e, {"phase", "count", "fraction"}, "sim.dropouts");
            DropoutSpec d;
            d.phase = phase_from(get_req<std::string>(e, "phase", "sim.dropouts"));
            d.count = get_opt<u32>(e, "count", 0, "sim.dropouts");
            d.fraction = get_opt<double>(e, "fraction", 0.0, "sim.dropouts");
            cfg.dropouts.push_back(d);
        }
    }
    auto gen = get_opt<std::string>(j, "input_gen", "uniform", "sim");
    if (gen == "uniform")
        cfg.input_gen = InputGen::uniform;
    else if (gen == "constant")
        cfg.input_gen = InputGen::constant;
    else if (gen == "file")
        cfg.input_gen = InputGen::file;
    else
        fail(Err::config_error, "sim: input_gen must be 'uniform', 'constant' or 'file'");
    cfg.constant_value = get_opt<u64>(j, "constant_value", 1, "sim");
    if (cfg.input_gen == InputGen::file)
        cfg.file_inputs = get_req<std::vector<std::vector<u64>>>(j, "inputs", "sim");
    cfg.trials = get_opt<u32>(j, "trials", 1, "sim");
    cfg.seed = get_opt<u64>(j, "seed", 0, "sim");
    cfg.record_trace = get_opt<bool>(j, "record_trace", false, "sim");
    cfg.use_system_crypto = get_opt<bool>(j, "use_system_crypto", false, "sim");
    cfg.tamper_frames = get_opt<u32>(j, "tamper_frames", 0, "sim");
    cfg.threads = get_opt<u32>(j, "threads", 0, "sim");
    return cfg;
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(Err::io_error, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(Err::config_error, path.string() + ": " + e.what());
    }
}

Params load_params_file(const std::filesystem::path& path) {
    return params_from_json(load_json_file(path));
}

SimConfig load_sim_file(const std::filesystem::path& path) {
    return sim_config_from_json(load_json_file(path));
}

void save_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Err::io_error, "cannot write " + path.string());
    out << text;
}

Bytes params_digest(const Params& p) {
    std::string canon = params_to_json(p).dump();
    Bytes digest(32);
    SHA256(reinterpret_cast<const unsigned char*>(canon.data()), canon.size(), digest.data());
    return digest;
}

namespace {

constexpr char kMagic[4] = {'S', 'A', 'G', 'G'};
constexpr u16 kShareVersion = 1;

}  // namespace

void write_share_file(const std::filesystem::path& path, const Shares& shares, const Params& p) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Err::io_error, "cannot write " + path.string());
    Bytes buf;
    buf.insert(buf.end(), kMagic, kMagic + 4);
    buf.push_back(u8(kShareVersion));
    buf.push_back(u8(kShareVersion >> 8));
    buf.push_back(8);  // element width
    buf.push_back(0);
    Bytes digest = params_digest(p);
    buf.insert(buf.end(), digest.begin(), digest.end());
    u32 n = shares.size();
    for (int i = 0; i < 4; ++i) buf.push_back(u8(n >> (8 * i)));
    Bytes bitmap((n + 7) / 8, 0);
    for (u32 i = 0; i < n; ++i)
        if (shares.erased[i]) bitmap[i / 8] |= u8(1 << (i % 8));
    buf.insert(buf.end(), bitmap.begin(), bitmap.end());
    for (int i = 0; i < 4; ++i) buf.push_back(u8(n >> (8 * i)));
    for (u32 i = 0; i < n; ++i) {
        u64 v = shares.erased[i] ? 0 : shares.values[i];
        for (int k = 0; k < 8; ++k) buf.push_back(u8(v >> (8 * k)));
    }
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
}

Shares read_share_file(const std::filesystem::path& path, const Params& p) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Err::io_error, "cannot open " + path.string());
    Bytes buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    const u32 n = p.size();
    const size_t bitmap_bytes = (n + 7) / 8;
    const size_t expect = 8 + 32 + 4 + bitmap_bytes + 4 + size_t(n) * 8;
    if (buf.size() != expect) fail(Err::io_error, path.string() + ": wrong share file size");
    if (!std::equal(kMagic, kMagic + 4, buf.begin()))
        fail(Err::io_error, path.string() + ": not a share file");
    u16 version = u16(buf[4]) | u16(buf[5]) << 8;
    if (version != kShareVersion) fail(Err::io_error, path.string() + ": unsupported version");
    if (buf[6] != 8) fail(Err::io_error, path.string() + ": unsupported element width");

    size_t pos = 8;
    if (!std::equal(buf.begin() + pos, buf.begin() + pos + 32, params_digest(p).begin()))
        fail(Err::config_error, path.string() + ": parameter digest mismatch");
    pos += 32;
    u32 stored_n = 0;
    for (int i = 0; i < 4; ++i) stored_n |= u32(buf[pos + i]) << (8 * i);
    pos += 4;
    if (stored_n != n) fail(Err::io_error, path.string() + ": share count mismatch");

    Shares s;
    s.values.assign(n, 0);
    s.erased.assign(n, 0);
    for (u32 i = 0; i < n; ++i) s.erased[i] = (buf[pos + i / 8] >> (i % 8)) & 1;
    pos += bitmap_bytes;
    u32 count = 0;
    for (int i = 0; i < 4; ++i) count |= u32(buf[pos + i]) << (8 * i);
    pos += 4;
    if (count != n) fail(Err::io_error, path.string() + ": value count mismatch");
    for (u32 i = 0; i < n; ++i) {
        u64 v = 0;
        for (int k = 0; k < 8; ++k) v |= u64(buf[pos + k]) << (8 * k);
        pos += 8;
        s.values[i] = v;
    }
    return s;
}

json trial_outcome_json(const TrialOutcome& o, bool with_timings) {
    json j;
    j["c0"] = o.c0;
    j["c1"] = o.c1;
    j["c2"] = o.c2;
    j["aborted"] = o.aborted;
    if (o.aborted) {
        j["abort_reason"] = abort_reason_name(o.abort_reason);
        j["abort_round"] = o.abort_round;
    } else {
        j["match"] = o.match;
        j["result"] = o.result;
    }
    j["c0_ids"] = o.c0_ids;
    j["c1_ids"] = o.c1_ids;
    j["c2_ids"] = o.c2_ids;
    j["ground_truth"] = o.ground_truth;
    j["overload"] = o.overload;
    j["bytes"] = {{"client_tx", o.client_tx_bytes},
                  {"client_rx", o.client_rx_bytes},
                  {"server_tx", o.server_tx_bytes},
                  {"server_rx", o.server_rx_bytes},
                  {"per_client_tx", o.per_client_tx},
                  {"per_client_rx", o.per_client_rx}};
    if (with_timings) j["round_ms"] = o.round_ms;
    return j;
}

json trace_to_json(const std::vector<Bytes>& trace) {
    json arr = json::array();
    for (const Bytes& b : trace) {
        Message m = decode_message(b);
        json e;
        e["round"] = message_round(m);
        u32 sender = message_sender(m);
        e["sender"] = sender == kServerId ? json("server") : json(sender);
        e["bytes"] = b.size();
        switch (m.index()) {
            case 0: e["type"] = "advertise_key"; break;
            case 1:
                e["type"] = "key_list";
                e["count"] = std::get<KeyList>(m).keys.size();
                break;
            case 2:
                e["type"] = "cipher_batch";
                e["count"] = std::get<CipherBatch>(m).ciphertexts.size();
                break;
            case 3:
                e["type"] = "cipher_delivery";
                e["receiver"] = std::get<CipherDelivery>(m).receiver;
                e["count"] = std::get<CipherDelivery>(m).frames.size();
                break;
            case 4:
                e["type"] = "sum_share";
                e["count"] = std::get<SumShare>(m).sums.size();
                break;
            default: e["type"] = "abort"; break;
        }
        arr.push_back(e);
    }
    return arr;
}

void write_trace_file(const std::filesystem::path& path, const std::vector<Bytes>& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Err::io_error, "cannot write " + path.string());
    for (const Bytes& b : trace) {
        u32 n = u32(b.size());
        char len[4];
        for (int i = 0; i < 4; ++i) len[i] = char(n >> (8 * i));
        out.write(len, 4);
        out.write(reinterpret_cast<const char*>(b.data()), std::streamsize(b.size()));
    }
}

std::vector<Bytes> read_trace_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Err::io_error, "cannot open " + path.string());
    std::vector<Bytes> trace;
    char len[4];
    while (in.read(len, 4)) {
        u32 n = 0;
        for (int i = 0; i < 4; ++i) n |= u32(u8(len[i])) << (8 * i);
        Bytes b(n);
        if (!in.read(reinterpret_cast<char*>(b.data()), n))
            fail(Err::io_error, path.string() + ": truncated trace");
        decode_message(b);  // validate eagerly
        trace.push_back(std::move(b));
    }
    return trace;
}

json campaign_report_json(const CampaignReport& r) {
    json j;
    j["trials"] = r.trials;
    j["matches"] = r.matches;
    j["aborts"] = r.aborts;
    j["mismatches"] = r.mismatches;
    j["overload"] = r.overload;
    j["success_rate"] = r.success_rate;
    j["wilson95"] = {r.wilson_low, r.wilson_high};
    j["mean_round_ms"] = r.mean_round_ms;
    j["median_round_ms"] = r.median_round_ms;
    j["total_client_tx_bytes"] = r.total_client_tx;
    j["total_server_tx_bytes"] = r.total_server_tx;
    j["client_tx_per_client_per_trial"] = r.client_tx_per_client_per_trial;
    j["server_tx_per_trial"] = r.server_tx_per_trial;
    j["abort_rounds"] = r.abort_rounds;
    return j;
}

std::string campaign_report_csv(const CampaignReport& r) {
    std::string s =
        "trials,matches,aborts,mismatches,success_rate,wilson_low,wilson_high,"
        "mean_r0_ms,mean_r1_ms,mean_r2_ms,client_tx_bytes,server_tx_bytes\n";
    s += std::to_string(r.trials) + "," + std::to_string(r.matches) + "," +
         std::to_string(r.aborts) + "," + std::to_string(r.mismatches) + "," +
         std::to_string(r.success_rate) + "," + std::to_string(r.wilson_low) + "," +
         std::to_string(r.wilson_high) + "," + std::to_string(r.mean_round_ms[0]) + "," +
         std::to_string(r.mean_round_ms[1]) + "," + std::to_string(r.mean_round_ms[2]) + "," +
         std::to_string(r.total_client_tx) + "," + std::to_string(r.total_server_tx) + "\n";
    return s;
}

json rank_audit_json(const RankAuditReport& r) {
    json j;
    j["subsets_checked"] = r.subsets_checked;
    j["failures"] = r.failures;
    j["subset_size"] = r.subset_size;
    j["exhaustive"] = r.exhaustive;
    if (!r.first_failure.empty()) j["first_failure"] = r.first_failure;
    return j;
}

json bench_report_json(const BenchReport& r) {
    json j;
    json pts = json::array();
    for (const auto& p : r.points) {
        pts.push_back({{"n", p.n}, {"q", p.q}, {"fast_ms", p.fast_ms}, {"shamir_ms", p.shamir_ms}});
    }
    j["points"] = pts;
    j["fast_doubling_ratio"] = r.fast_doubling_ratio;
    j["shamir_doubling_ratio"] = r.shamir_doubling_ratio;
    return j;
}

std::string bench_report_csv(const BenchReport& r) {
    std::string s = "n,q,fast_ms,shamir_ms\n";
    for (const auto& p : r.points)
        s += std::to_string(p.n) + "," + std::to_string(p.q) + "," + std::to_string(p.fast_ms) +
             "," + std::to_string(p.shamir_ms) + "\n";
    return s;
}

}  // namespace specagg
