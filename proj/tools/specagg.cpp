// Command-line front end: parameter derivation, share/reconstruct demos,
// protocol simulation, privacy audits, and scaling benchmarks.  Every
// subcommand is a thin adapter over the library; exit codes are 0 (ok),
// 1 (configuration error), 2 (protocol abort), 3 (audit failure).

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <iostream>

#include "specagg/io.hpp"

using namespace specagg;

namespace {

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text << std::endl;
    else
        save_text_file(out_path, text + "\n");
}

std::vector<u64> parse_u64_list(const std::string& csv) {
    std::vector<u64> out;
    size_t pos = 0;
    while (pos < csv.size()) {
        size_t next = csv.find(',', pos);
        if (next == std::string::npos) next = csv.size();
        out.push_back(std::stoull(csv.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

std::vector<DropoutSpec> parse_dropouts(const std::string& spec) {
    // "r1:12" or "r0:0.05,r2:3"; rK = after-round-K-send
    std::vector<DropoutSpec> out;
    size_t pos = 0;
    while (pos < spec.size()) {
        size_t next = spec.find(',', pos);
        if (next == std::string::npos) next = spec.size();
        std::string item = spec.substr(pos, next - pos);
        pos = next + 1;
        auto colon = item.find(':');
        if (colon == std::string::npos || item.size() < 4 || item[0] != 'r')
            fail(Err::config_error, "dropout spec: expected rK:count or rK:fraction, got '" + item + "'");
        DropoutSpec d;
        int round = item[1] - '0';
        if (round < 0 || round > 2) fail(Err::config_error, "dropout spec: round must be 0..2");
        d.phase = DropPhase(round);
        std::string amount = item.substr(colon + 1);
        if (amount.find('.') != std::string::npos)
            d.fraction = std::stod(amount);
        else
            d.count = u32(std::stoul(amount));
        out.push_back(d);
    }
    return out;
}

struct ParamsCliOptions {
    std::string variant = "product";
    u64 n = 0;
    u32 n0 = 0, n1 = 0;
    u64 q = 0;
    std::string alpha = "1/2", beta = "1/4", delta0 = "1/10", delta1 = "1/10";
    double rowcode_c = 1.0;
    bool with_sets = false;
    std::string out;
};

int cmd_params(const ParamsCliOptions& opt) {
    Params p;
    p.variant = opt.variant == "row" ? Variant::row_code : Variant::product_code;
    if (opt.n0 && opt.n1) {
        p.n0 = opt.n0;
        p.n1 = opt.n1;
    } else if (opt.n) {
        auto [a, b] = p.variant == Variant::row_code ? rowcode_factors(opt.n, opt.rowcode_c)
                                                     : balanced_factors(opt.n);
        p.n0 = a;
        p.n1 = b;
    } else {
        fail(Err::config_error, "params: give either --N or both --n0 and --n1");
    }
    p.alpha = Rational::parse(opt.alpha);
    p.beta = Rational::parse(opt.beta);
    p.delta0 = Rational::parse(opt.delta0);
    p.delta1 = Rational::parse(opt.delta1);
    p.q = opt.q ? opt.q : find_field(p.size(), 2);

    Scheme scheme = Scheme::build(p);
    const Derived& d = scheme.derived();
    json j;
    j["params"] = params_to_json(p);
    j["q"] = p.q;
    j["omega"] = scheme.field().omega();
    j["derived"] = {{"s_count", d.s_count},     {"t_count", d.t_count},
                    {"d_count", d.d_count},     {"z0_rows", d.z0_rows},
                    {"z1_cols", d.z1_cols},     {"free_rank", d.free_rank},
                    {"mask_count", d.mask_count}, {"peel_iters", d.peel_iters}};
    j["set_sizes"] = {{"secrets", scheme.sets().secrets.size()},
                      {"proof", scheme.sets().proof.size()},
                      {"z0", scheme.sets().z0.size()},
                      {"z1", scheme.sets().z1.size()},
                      {"masks", scheme.sets().free_masks.size()}};
    if (opt.with_sets) j["sets"] = sets_to_json(scheme.sets());
    emit(j.dump(2), opt.out);
    return 0;
}

struct ShareCliOptions {
    std::string params_file;
    std::string secrets_csv;
    u32 random_count = 0;
    u64 seed = 1;
    std::string out = "shares.bin";
};

int cmd_share(const ShareCliOptions& opt) {
    Params p = load_params_file(opt.params_file);
    Scheme scheme = Scheme::build(p);
    Rng rng(opt.seed);
    std::vector<u64> secrets;
    if (!opt.secrets_csv.empty())
        secrets = parse_u64_list(opt.secrets_csv);
    else {
        u32 k = opt.random_count ? opt.random_count : scheme.derived().s_count;
        secrets.resize(k);
        for (auto& v : secrets) v = rng.below(p.q);
    }
    Shares sh = share(secrets, scheme, rng);
    write_share_file(opt.out, sh, p);
    json j;
    j["written"] = opt.out;
    j["n"] = sh.size();
    j["secrets"] = secrets;
    j["parity_ok"] = parity_check(sh, scheme);
    emit(j.dump(2), "");
    return 0;
}

struct ReconCliOptions {
    std::string params_file;
    std::string shares_file;
    std::string drop_csv;
    std::string out;
};

int cmd_recon(const ReconCliOptions& opt) {
    Params p = load_params_file(opt.params_file);
    Scheme scheme = Scheme::build(p);
    Shares sh = read_share_file(opt.shares_file, p);
    if (!opt.drop_csv.empty()) {
        for (u64 id : parse_u64_list(opt.drop_csv)) {
            if (id >= sh.size()) fail(Err::config_error, "recon: dropped id out of range");
            sh.erased[size_t(id)] = 1;
            sh.values[size_t(id)] = 0;
        }
    }
    auto secrets = reconstruct(sh, scheme);
    json j;
    j["erasures"] = sh.erased_count();
    if (secrets) {
        j["ok"] = true;
        j["secrets"] = *secrets;
        emit(j.dump(2), opt.out);
        return 0;
    }
    j["ok"] = false;
    j["reason"] = "peeling stalled; erasure pattern is a stopping set";
    emit(j.dump(2), opt.out);
    return 2;
}

struct SimulateCliOptions {
    std::string config_file;
    std::string dropouts;
    u32 trials = 0;
    std::optional<u64> seed;
    std::string format = "json";
    std::string out;
    std::string trace_out;
    bool timings = false;
};

int cmd_simulate(const SimulateCliOptions& opt) {
    SimConfig cfg = load_sim_file(opt.config_file);
    if (!opt.dropouts.empty()) cfg.dropouts = parse_dropouts(opt.dropouts);
    if (opt.trials) cfg.trials = opt.trials;
    if (opt.seed) cfg.seed = *opt.seed;

    if (cfg.trials == 1) {
        if (!opt.trace_out.empty()) cfg.record_trace = true;
        TrialOutcome o = run_trial(cfg, cfg.seed);
        if (!opt.trace_out.empty()) write_trace_file(opt.trace_out, o.trace);
        emit(trial_outcome_json(o, opt.timings).dump(2), opt.out);
        return o.aborted ? 2 : 0;
    }
    if (!opt.trace_out.empty())
        fail(Err::config_error, "simulate: --trace needs --trials 1");
    CampaignReport rep = run_campaign(cfg);
    emit(opt.format == "csv" ? campaign_report_csv(rep) : campaign_report_json(rep).dump(2),
         opt.out);
    return (rep.matches == 0 && rep.aborts > 0) ? 2 : 0;
}

struct SearchCliOptions {
    std::string variant = "product";
    u64 n = 0;
    u32 n0 = 0, n1 = 0;
    u32 target_s = 0, target_t = 0, target_d = 0;
    u32 top = 5;
    std::string out;
};

// plain grid search over small-denominator fractions; scores by L1 distance
// of (S,T,D) to the target
int cmd_search(const SearchCliOptions& opt) {
    Params base;
    base.variant = opt.variant == "row" ? Variant::row_code : Variant::product_code;
    if (opt.n0 && opt.n1) {
        base.n0 = opt.n0;
        base.n1 = opt.n1;
    } else if (opt.n) {
        auto [a, b] = base.variant == Variant::row_code ? rowcode_factors(opt.n)
                                                        : balanced_factors(opt.n);
        base.n0 = a;
        base.n1 = b;
    } else {
        fail(Err::config_error, "search: give either --N or both --n0 and --n1");
    }
    base.q = find_field(base.size(), 2);

    struct Hit {
        u64 score;
        Params p;
        Derived d;
    };
    std::vector<Hit> hits;
    const u32 beta_den = base.variant == Variant::product_code ? 20 : 10;
    const u32 beta_max = base.variant == Variant::product_code ? 9 : 9;  // beta < 1/2 resp. < 1
    for (u32 a = 1; a <= 9; ++a)
        for (u32 b = 1; b <= beta_max; ++b)
            for (u32 d0 = 1; d0 <= 9; ++d0)
                for (u32 d1 = 1; d1 <= (base.variant == Variant::product_code ? 9u : 1u); ++d1) {
                    Params p = base;
                    p.alpha = rat(a, 10);
                    p.beta = rat(b, beta_den);
                    p.delta0 = rat(d0, 10);
                    p.delta1 = rat(d1, 10);
                    try {
                        Derived d = derive(p);
                        u64 score = u64(std::abs(int(d.s_count) - int(opt.target_s))) +
                                    u64(std::abs(int(d.t_count) - int(opt.target_t))) +
                                    u64(std::abs(int(d.d_count) - int(opt.target_d)));
                        hits.push_back({score, p, d});
                    } catch (const Error&) {
                        // degenerate corner of the grid; skip
                    }
                }
    std::stable_sort(hits.begin(), hits.end(),
                     [](const Hit& x, const Hit& y) { return x.score < y.score; });
    if (hits.size() > opt.top) hits.resize(opt.top);

    json arr = json::array();
    for (const Hit& h : hits) {
        arr.push_back({{"score", h.score},
                       {"alpha", h.p.alpha.str()},
                       {"beta", h.p.beta.str()},
                       {"delta0", h.p.delta0.str()},
                       {"delta1", h.p.delta1.str()},
                       {"s_count", h.d.s_count},
                       {"t_count", h.d.t_count},
                       {"d_count", h.d.d_count}});
    }
    json j;
    j["n0"] = base.n0;
    j["n1"] = base.n1;
    j["target"] = {{"s", opt.target_s}, {"t", opt.target_t}, {"d", opt.target_d}};
    j["candidates"] = arr;
    emit(j.dump(2), opt.out);
    return 0;
}

struct AuditCliOptions {
    std::string params_file;
    u32 subsets = 500;
    u32 size = 0;
    u32 exhaustive = 0;
    u32 tv_size = 0;
    u64 seed = 1;
    std::string out;
};

int cmd_audit(const AuditCliOptions& opt) {
    Params p = load_params_file(opt.params_file);
    Scheme scheme = Scheme::build(p);
    json j;
    j["params"] = params_to_json(p);
    bool failed = false;

    if (opt.exhaustive) {
        RankAuditReport rep = rank_audit_exhaustive(scheme, opt.exhaustive);
        j["exhaustive_rank_audit"] = rank_audit_json(rep);
        failed |= rep.failures != 0;
    }
    u32 size = opt.size ? opt.size : scheme.derived().t_count;
    Rng rng(opt.seed);
    RankAuditReport rep = rank_audit(scheme, size, opt.subsets, rng);
    j["rank_audit"] = rank_audit_json(rep);
    failed |= rep.failures != 0;

    if (opt.tv_size) {
        std::vector<u32> coalition(opt.tv_size);
        for (u32 i = 0; i < opt.tv_size; ++i) coalition[i] = i;
        std::vector<u64> sa(scheme.derived().s_count, 0), sb(scheme.derived().s_count, 1);
        TvReport tv = empirical_privacy_test(scheme, coalition, sa, sb);
        j["tv"] = {{"states", tv.states_enumerated},
                   {"distance", tv.tv_distance},
                   {"exact_zero", tv.exact_zero}};
        if (opt.tv_size <= scheme.derived().t_count) failed |= !tv.exact_zero;
    }
    j["failed"] = failed;
    emit(j.dump(2), opt.out);
    return failed ? 3 : 0;
}

int cmd_trace(const std::string& in_path, const std::string& out_path) {
    std::vector<Bytes> trace = read_trace_file(in_path);
    emit(trace_to_json(trace).dump(2), out_path);
    return 0;
}

struct BenchCliOptions {
    std::string sizes_csv;
    u32 dropouts = 8;
    u32 runs = 5;
    std::string format = "json";
    std::string out;
};

int cmd_bench(const BenchCliOptions& opt) {
    std::vector<u32> sizes;
    if (opt.sizes_csv.empty())
        sizes = bench_default_sizes();
    else
        for (u64 v : parse_u64_list(opt.sizes_csv)) sizes.push_back(u32(v));
    BenchReport rep = bench_scaling(sizes, opt.dropouts, opt.runs);
    emit(opt.format == "csv" ? bench_report_csv(rep) : bench_report_json(rep).dump(2), opt.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral multi-secret sharing and masked-sum aggregation toolkit"};
    app.require_subcommand(1);

    ParamsCliOptions po;
    auto* params_cmd = app.add_subcommand("params", "derive scheme parameters and index sets");
    params_cmd->add_option("--variant", po.variant)->check(CLI::IsMember({"product", "row"}));
    params_cmd->add_option("--N", po.n, "total share count (auto-factored)");
    params_cmd->add_option("--n0", po.n0);
    params_cmd->add_option("--n1", po.n1);
    params_cmd->add_option("--q", po.q, "field modulus (0 = smallest usable prime)");
    params_cmd->add_option("--alpha", po.alpha);
    params_cmd->add_option("--beta", po.beta);
    params_cmd->add_option("--delta0", po.delta0);
    params_cmd->add_option("--delta1", po.delta1);
    params_cmd->add_option("--rowcode-c", po.rowcode_c, "n0 ~ c*log2(N) for --variant row");
    params_cmd->add_flag("--sets", po.with_sets, "include the full index sets");
    params_cmd->add_option("--out", po.out);

    ShareCliOptions so;
    auto* share_cmd = app.add_subcommand("share", "split secrets into a share file");
    share_cmd->add_option("--params", so.params_file)->required();
    share_cmd->add_option("--secrets", so.secrets_csv, "comma-separated field elements");
    share_cmd->add_option("--random", so.random_count, "generate this many random secrets");
    share_cmd->add_option("--seed", so.seed);
    share_cmd->add_option("--out", so.out);

    ReconCliOptions ro;
    auto* recon_cmd = app.add_subcommand("recon", "reconstruct secrets from a share file");
    recon_cmd->add_option("--params", ro.params_file)->required();
    recon_cmd->add_option("--shares", ro.shares_file)->required();
    recon_cmd->add_option("--drop", ro.drop_csv, "additionally erase these share ids");
    recon_cmd->add_option("--out", ro.out);

    SimulateCliOptions mo;
    auto* sim_cmd = app.add_subcommand("simulate", "run protocol trials");
    sim_cmd->add_option("--config", mo.config_file)->required();
    sim_cmd->add_option("--dropouts", mo.dropouts, "override, e.g. r1:12 or r0:0.05");
    sim_cmd->add_option("--trials", mo.trials);
    sim_cmd->add_option("--seed", mo.seed);
    sim_cmd->add_option("--format", mo.format)->check(CLI::IsMember({"json", "csv"}));
    sim_cmd->add_option("--out", mo.out);
    sim_cmd->add_option("--trace", mo.trace_out, "write the binary message trace (single trial)");
    sim_cmd->add_flag("--timings", mo.timings, "include wall-clock timings (not replayable)");

    SearchCliOptions go;
    auto* search_cmd = app.add_subcommand("search", "grid-search fractions for a target (S,T,D)");
    search_cmd->add_option("--variant", go.variant)->check(CLI::IsMember({"product", "row"}));
    search_cmd->add_option("--N", go.n);
    search_cmd->add_option("--n0", go.n0);
    search_cmd->add_option("--n1", go.n1);
    search_cmd->add_option("--target-s", go.target_s)->required();
    search_cmd->add_option("--target-t", go.target_t)->required();
    search_cmd->add_option("--target-d", go.target_d)->required();
    search_cmd->add_option("--top", go.top);
    search_cmd->add_option("--out", go.out);

    AuditCliOptions ao;
    auto* audit_cmd = app.add_subcommand("audit", "privacy rank audit (and exact TV on tiny instances)");
    audit_cmd->add_option("--params", ao.params_file)->required();
    audit_cmd->add_option("--subsets", ao.subsets, "random subsets to sample");
    audit_cmd->add_option("--size", ao.size, "coalition size (default: privacy threshold)");
    audit_cmd->add_option("--exhaustive", ao.exhaustive, "also walk all subsets up to this size");
    audit_cmd->add_option("--tv", ao.tv_size, "exact TV distance for coalition {0..k-1}");
    audit_cmd->add_option("--seed", ao.seed);
    audit_cmd->add_option("--out", ao.out);

    std::string trace_in, trace_out;
    auto* trace_cmd = app.add_subcommand("trace", "decode a binary message trace to JSON");
    trace_cmd->add_option("--in", trace_in)->required();
    trace_cmd->add_option("--out", trace_out);

    BenchCliOptions bo;
    auto* bench_cmd = app.add_subcommand("bench", "server reconstruction scaling benchmark");
    bench_cmd->add_option("--sizes", bo.sizes_csv, "comma-separated share counts");
    bench_cmd->add_option("--dropouts", bo.dropouts);
    bench_cmd->add_option("--runs", bo.runs);
    bench_cmd->add_option("--format", bo.format)->check(CLI::IsMember({"json", "csv"}));
    bench_cmd->add_option("--out", bo.out);

    try {
        app.parse(argc, argv);
        if (params_cmd->parsed()) return cmd_params(po);
        if (share_cmd->parsed()) return cmd_share(so);
        if (recon_cmd->parsed()) return cmd_recon(ro);
        if (sim_cmd->parsed()) return cmd_simulate(mo);
        if (search_cmd->parsed()) return cmd_search(go);
        if (audit_cmd->parsed()) return cmd_audit(ao);
        if (trace_cmd->parsed()) return cmd_trace(trace_in, trace_out);
        if (bench_cmd->parsed()) return cmd_bench(bo);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 1;
    } catch (const ProtocolAbort& e) {
        std::cerr << "abort: " << e.what() << std::endl;
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
