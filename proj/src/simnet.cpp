#include "specagg/simnet.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <thread>

namespace specagg {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

u32 SimConfig::requested_dropouts(u32 n) const {
    u64 total = 0;
    for (const auto& d : dropouts) total += d.count ? d.count : u64(d.fraction * n);
    return u32(std::min<u64>(total, n));
}

void SimConfig::validate(const Scheme& scheme) const {
    protocol.validate(scheme);
    if (trials < 1) fail(Err::config_error, "sim: trial count must be >= 1");
    for (const auto& d : dropouts)
        if (d.count == 0 && (d.fraction < 0.0 || d.fraction > 1.0))
            fail(Err::config_error, "sim: dropout fraction outside [0,1]");
    if (input_gen == InputGen::file) {
        if (file_inputs.size() != scheme.size())
            fail(Err::config_error, "sim: file inputs must have one row per client");
        for (const auto& row : file_inputs) {
            if (row.size() != protocol.input_len)
                fail(Err::config_error, "sim: file input row has the wrong length");
            for (u64 v : row)
                if (v >= protocol.input_range)
                    fail(Err::config_error, "sim: file input outside [0, R)");
        }
    }
}

std::vector<u32> sample_dropouts(const std::vector<u32>& pool, u32 count, Rng& rng) {
    std::vector<u32> ids = pool;
    count = u32(std::min<size_t>(count, ids.size()));
    for (u32 i = 0; i < count; ++i) std::swap(ids[i], ids[i + rng.below(ids.size() - i)]);
    ids.resize(count);
    std::sort(ids.begin(), ids.end());
    return ids;
}

TrialOutcome run_trial(const SimConfig& cfg, u64 seed) {
    Scheme scheme = Scheme::build(cfg.protocol.params);
    return run_trial(scheme, cfg, seed);
}

TrialOutcome run_trial(const Scheme& scheme, const SimConfig& cfg, u64 seed) {
    cfg.validate(scheme);
    const u32 n = scheme.size();
    auto suite = cfg.use_system_crypto ? CryptoSuite::system() : CryptoSuite::deterministic();

    TrialOutcome out;
    out.overload = cfg.requested_dropouts(n) > cfg.protocol.budget(scheme);

    Rng master(seed);
    Rng drop_rng = master.fork(0xd20);
    Rng tamper_rng = master.fork(0x7a3);

    std::vector<Client> clients;
    clients.reserve(n);
    std::vector<std::vector<u64>> inputs(n);
    for (u32 id = 0; id < n; ++id) {
        auto& u = inputs[id];
        switch (cfg.input_gen) {
            case InputGen::file: u = cfg.file_inputs[id]; break;
            case InputGen::constant:
                u.assign(cfg.protocol.input_len, cfg.constant_value % cfg.protocol.input_range);
                break;
            case InputGen::uniform:
                u.resize(cfg.protocol.input_len);
                for (auto& v : u) v = master.below(cfg.protocol.input_range);
                break;
        }
        clients.emplace_back(id, scheme, cfg.protocol, *suite, u, master.fork(1000 + id));
    }
    Server server(scheme, cfg.protocol);
    out.per_client_tx.assign(n, 0);
    out.per_client_rx.assign(n, 0);

    std::vector<u8> alive(n, 1);
    auto live_ids = [&] {
        std::vector<u32> ids;
        for (u32 i = 0; i < n; ++i)
            if (alive[i]) ids.push_back(i);
        return ids;
    };
    auto apply_phase = [&](DropPhase phase) {
        for (const auto& d : cfg.dropouts) {
            if (d.phase != phase) continue;
            u32 count = d.count ? d.count : u32(d.fraction * n);
            for (u32 id : sample_dropouts(live_ids(), count, drop_rng)) alive[id] = 0;
        }
    };
    auto account_to_server = [&](u32 from, const Message& m) {
        u64 b = encode_message(m).size();
        out.client_tx_bytes += b;
        out.per_client_tx[from] += b;
        out.server_rx_bytes += b;
        if (cfg.record_trace) out.trace.push_back(encode_message(m));
    };
    auto account_to_client = [&](u32 to, const Message& m) {
        u64 b = encode_message(m).size();
        out.server_tx_bytes += b;
        out.client_rx_bytes += b;
        out.per_client_rx[to] += b;
        if (cfg.record_trace) out.trace.push_back(encode_message(m));
    };

    try {
        // round 0: every live client advertises its key
        auto t0 = Clock::now();
        for (u32 id : live_ids()) {
            AdvertiseKey msg = clients[id].round0();
            account_to_server(id, msg);
            server.receive(msg);
        }
        apply_phase(DropPhase::after_round0_send);
        KeyList list = server.finish_round0();
        u64 list_bytes = encode_message(list).size();
        for (u32 id : live_ids()) {
            out.server_tx_bytes += list_bytes;
            out.client_rx_bytes += list_bytes;
            out.per_client_rx[id] += list_bytes;
        }
        if (cfg.record_trace) out.trace.push_back(encode_message(list));
        out.round_ms[0] = ms_since(t0);

        // round 1
        t0 = Clock::now();
        for (u32 id : live_ids()) {
            CipherBatch batch = clients[id].round1(list);
            account_to_server(id, batch);
            server.receive(batch);
        }
        apply_phase(DropPhase::after_round1_send);
        std::vector<CipherDelivery> deliveries = server.finish_round1();
        out.round_ms[1] = ms_since(t0);

        // ground truth: everyone in C1 contributes
        out.ground_truth.assign(cfg.protocol.input_len, 0);
        for (u32 id : server.c1())
            for (u32 i = 0; i < cfg.protocol.input_len; ++i) out.ground_truth[i] += inputs[id][i];

        // optional fault injection into the routed ciphertexts
        u32 tampered = 0;
        for (auto& d : deliveries) {
            if (tampered >= cfg.tamper_frames) break;
            if (d.frames.empty()) continue;
            Bytes& frame = d.frames[tamper_rng.below(d.frames.size())];
            frame[tamper_rng.below(frame.size())] ^= u8(1 + tamper_rng.below(255));
            ++tampered;
        }

        // round 2
        t0 = Clock::now();
        for (const auto& d : deliveries) {
            if (!alive[d.receiver]) continue;
            account_to_client(d.receiver, d);
            SumShare s = clients[d.receiver].round2(d);
            account_to_server(d.receiver, s);
            server.receive(s);
        }
        apply_phase(DropPhase::after_round2_send);
        out.result = server.finish_round2();
        out.round_ms[2] = ms_since(t0);

        out.match = (out.result == out.ground_truth);
    } catch (const ProtocolAbort& a) {
        out.aborted = true;
        out.abort_reason = a.reason();
        out.abort_round = a.round();
    }
    out.c0 = u32(server.c0().size());
    out.c1 = u32(server.c1().size());
    out.c2 = u32(server.c2().size());
    out.c0_ids.assign(server.c0().begin(), server.c0().end());
    out.c1_ids.assign(server.c1().begin(), server.c1().end());
    out.c2_ids.assign(server.c2().begin(), server.c2().end());
    return out;
}

Bytes TrialOutcome::serialize() const {
    Bytes b;
    auto put32 = [&](u32 v) {
        for (int i = 0; i < 4; ++i) b.push_back(u8(v >> (8 * i)));
    };
    auto put64 = [&](u64 v) {
        for (int i = 0; i < 8; ++i) b.push_back(u8(v >> (8 * i)));
    };
    put32(c0);
    put32(c1);
    put32(c2);
    for (const auto* ids : {&c0_ids, &c1_ids, &c2_ids}) {
        put32(u32(ids->size()));
        for (u32 id : *ids) put32(id);
    }
    b.push_back(aborted);
    b.push_back(u8(abort_reason));
    put32(abort_round);
    b.push_back(match);
    b.push_back(overload);
    put64(result.size());
    for (u64 v : result) put64(v);
    put64(ground_truth.size());
    for (u64 v : ground_truth) put64(v);
    put64(client_tx_bytes);
    put64(client_rx_bytes);
    put64(server_tx_bytes);
    put64(server_rx_bytes);
    for (const auto* per : {&per_client_tx, &per_client_rx}) {
        put64(per->size());
        for (u64 v : *per) put64(v);
    }
    put64(trace.size());
    for (const auto& t : trace) {
        put64(t.size());
        b.insert(b.end(), t.begin(), t.end());
    }
    return b;
}

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

CampaignReport run_campaign(const SimConfig& cfg) {
    Scheme scheme = Scheme::build(cfg.protocol.params);
    cfg.validate(scheme);

    std::vector<TrialOutcome> outcomes(cfg.trials);
    u32 threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, cfg.trials);
    Rng seeder(cfg.seed);
    std::vector<u64> seeds(cfg.trials);
    for (auto& s : seeds) s = seeder.next();

    auto worker = [&](u32 t0, u32 stride) {
        for (u32 t = t0; t < cfg.trials; t += stride)
            outcomes[t] = run_trial(scheme, cfg, seeds[t]);
    };
    if (threads <= 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (u32 t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
        for (auto& th : pool) th.join();
    }

    CampaignReport rep;
    rep.trials = cfg.trials;
    std::array<std::vector<double>, 3> rounds;
    for (const auto& o : outcomes) {
        rep.overload |= o.overload;
        if (o.aborted) {
            ++rep.aborts;
            rep.abort_rounds.push_back(o.abort_round);
        } else if (o.match) {
            ++rep.matches;
        } else {
            ++rep.mismatches;
        }
        for (int r = 0; r < 3; ++r) {
            rep.mean_round_ms[r] += o.round_ms[r];
            rounds[r].push_back(o.round_ms[r]);
        }
        rep.total_client_tx += o.client_tx_bytes;
        rep.total_server_tx += o.server_tx_bytes;
    }
    for (int r = 0; r < 3; ++r) {
        rep.mean_round_ms[r] /= cfg.trials;
        rep.median_round_ms[r] = median_of(rounds[r]);
    }
    rep.success_rate = double(rep.matches) / cfg.trials;
    rep.client_tx_per_client_per_trial =
        double(rep.total_client_tx) / cfg.trials / scheme.size();
    rep.server_tx_per_trial = double(rep.total_server_tx) / cfg.trials;

    // Wilson 95% interval
    const double z = 1.959963984540054;
    double nn = cfg.trials, p = rep.success_rate;
    double denom = 1.0 + z * z / nn;
    double center = (p + z * z / (2 * nn)) / denom;
    double half = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / denom;
    rep.wilson_low = std::max(0.0, center - half);
    rep.wilson_high = std::min(1.0, center + half);
    return rep;
}

std::vector<u32> bench_default_sizes() { return {210, 420, 840, 1680, 3360, 6720, 13440}; }

namespace {

// time `body` by batch repetition until the window exceeds ~20 ms
double timed_ms(const std::function<void()>& body) {
    body();  // warm-up
    u32 batch = 1;
    for (;;) {
        auto t0 = Clock::now();
        for (u32 i = 0; i < batch; ++i) body();
        double ms = ms_since(t0);
        if (ms >= 20.0 || batch >= (1u << 20)) return ms / batch;
        batch = ms <= 0.01 ? batch * 64 : u32(batch * std::max(2.0, 25.0 / ms));
    }
}

}  // namespace

BenchReport bench_scaling(const std::vector<u32>& sizes, u32 dropouts, u32 runs) {
    BenchReport rep;
    for (u32 n : sizes) {
        auto [n0, n1] = balanced_factors(n);
        Params p;
        p.variant = Variant::product_code;
        p.n0 = n0;
        p.n1 = n1;
        p.alpha = rat(1, 2);
        p.beta = rat(1, 4);
        p.delta0 = rat(1, 10);
        p.delta1 = rat(1, 10);
        p.q = find_field(n, 2 * u64(n));
        Scheme scheme = Scheme::build(p);
        Rng rng(0xbe9c0 + n);

        std::vector<u64> secrets(scheme.derived().s_count);
        for (auto& v : secrets) v = rng.below(p.q);
        Shares full = share(secrets, scheme, rng);
        Shares eroded = full;
        // erasures on distinct rows and columns so every run peels the same way
        u32 spread = std::min<u32>(dropouts, std::min(n0, n1) - 1);
        for (u32 i = 0; i < spread; ++i) {
            eroded.values[i] = 0;
            eroded.erased[i] = 1;  // flat i sits at grid (i, i)
        }

        ShamirParams sp;
        sp.n = n;
        sp.s_count = u32(rat(1, 5).floor_scaled(n));
        sp.t_count = u32(rat(1, 10).floor_scaled(n));
        sp.q = p.q;
        std::vector<u64> ssec(sp.s_count);
        for (auto& v : ssec) v = rng.below(sp.q);
        Shares sh_full = shamir_share(ssec, sp, rng);
        Shares sh_eroded = sh_full;
        for (u32 i = 0; i < spread; ++i) {
            sh_eroded.values[i] = 0;
            sh_eroded.erased[i] = 1;
        }

        std::vector<double> fast_runs, shamir_runs;
        for (u32 r = 0; r < runs; ++r) {
            fast_runs.push_back(timed_ms([&] {
                auto got = reconstruct(eroded, scheme);
                if (!got) fail(Err::config_error, "bench: peeling unexpectedly failed");
            }));
            shamir_runs.push_back(timed_ms([&] {
                auto got = shamir_recon(sh_eroded, sp);
                if (!got) fail(Err::config_error, "bench: shamir unexpectedly failed");
            }));
        }
        rep.points.push_back(BenchPoint{n, p.q, median_of(fast_runs), median_of(shamir_runs)});
    }

    std::vector<double> fr, sr;
    for (size_t i = 0; i + 1 < rep.points.size(); ++i) {
        if (rep.points[i + 1].n == 2 * rep.points[i].n) {
            fr.push_back(rep.points[i + 1].fast_ms / rep.points[i].fast_ms);
            sr.push_back(rep.points[i + 1].shamir_ms / rep.points[i].shamir_ms);
        }
    }
    rep.fast_doubling_ratio = median_of(fr);
    rep.shamir_doubling_ratio = median_of(sr);
    return rep;
}

}  // namespace specagg
