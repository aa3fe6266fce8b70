#include "specagg/audit.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace specagg {

GeneratorMatrix build_generator(const Scheme& scheme) {
    const Field& F = scheme.field();
    const u32 n = scheme.size();
    const auto& sets = scheme.sets();
    std::vector<u32> cols = sets.secrets;
    for (u32 f : sets.mask_cells()) cols.push_back(f);

    GeneratorMatrix g;
    g.rows = n;
    g.cols = u32(cols.size());
    g.secret_cols = u32(sets.secrets.size());
    g.data.resize(u64(n) * cols.size());
    for (u32 r = 0; r < n; ++r)
        for (u32 c = 0; c < cols.size(); ++c)
            g.data[u64(r) * g.cols + c] = F.root_pow(u64(r) * cols[c] % n);
    return g;
}

u32 rank_gf(std::vector<u64> m, u32 rows, u32 cols, const Field& F) {
    u32 rank = 0;
    for (u32 c = 0; c < cols && rank < rows; ++c) {
        u32 piv = rank;
        while (piv < rows && m[u64(piv) * cols + c] == 0) ++piv;
        if (piv == rows) continue;
        if (piv != rank)
            for (u32 j = c; j < cols; ++j)
                std::swap(m[u64(piv) * cols + j], m[u64(rank) * cols + j]);
        u64 inv = F.inv(m[u64(rank) * cols + c]);
        for (u32 j = c; j < cols; ++j) m[u64(rank) * cols + j] = F.mul(m[u64(rank) * cols + j], inv);
        for (u32 r = 0; r < rows; ++r) {
            if (r == rank) continue;
            u64 f = m[u64(r) * cols + c];
            if (f == 0) continue;
            for (u32 j = c; j < cols; ++j)
                m[u64(r) * cols + j] = F.sub(m[u64(r) * cols + j], F.mul(f, m[u64(rank) * cols + j]));
        }
        ++rank;
    }
    return rank;
}

bool rank_condition(const GeneratorMatrix& g, std::span<const u32> coalition, const Field& F) {
    const u32 rows = u32(coalition.size());
    if (rows == 0) return true;
    std::vector<u64> full(u64(rows) * g.cols);
    std::vector<u64> masks(u64(rows) * (g.cols - g.secret_cols));
    for (u32 i = 0; i < rows; ++i) {
        u32 r = coalition[i];
        if (r >= g.rows) fail(Err::out_of_range, "rank condition: client id out of range");
        for (u32 c = 0; c < g.cols; ++c) full[u64(i) * g.cols + c] = g.at(r, c);
        for (u32 c = g.secret_cols; c < g.cols; ++c)
            masks[u64(i) * (g.cols - g.secret_cols) + (c - g.secret_cols)] = g.at(r, c);
    }
    return rank_gf(std::move(full), rows, g.cols, F) ==
           rank_gf(std::move(masks), rows, g.cols - g.secret_cols, F);
}

namespace {

bool next_combination(std::vector<u32>& comb, u32 n) {
    u32 k = u32(comb.size());
    for (u32 i = k; i-- > 0;) {
        if (comb[i] < n - (k - i)) {
            ++comb[i];
            for (u32 j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
            return true;
        }
    }
    return false;
}

std::vector<u32> random_subset(u32 n, u32 k, Rng& rng) {
    std::vector<u32> ids(n);
    for (u32 i = 0; i < n; ++i) ids[i] = i;
    for (u32 i = 0; i < k; ++i) std::swap(ids[i], ids[i + rng.below(n - i)]);
    ids.resize(k);
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace

RankAuditReport rank_audit(const Scheme& scheme, u32 subset_size, u64 samples, Rng& rng) {
    GeneratorMatrix g = build_generator(scheme);
    RankAuditReport rep;
    rep.subset_size = subset_size;
    for (u64 t = 0; t < samples; ++t) {
        auto subset = random_subset(scheme.size(), subset_size, rng);
        ++rep.subsets_checked;
        if (!rank_condition(g, subset, scheme.field())) {
            ++rep.failures;
            if (rep.first_failure.empty()) rep.first_failure = subset;
        }
    }
    return rep;
}

RankAuditReport rank_audit_exhaustive(const Scheme& scheme, u32 max_size) {
    GeneratorMatrix g = build_generator(scheme);
    RankAuditReport rep;
    rep.subset_size = max_size;
    rep.exhaustive = true;
    for (u32 k = 1; k <= max_size; ++k) {
        std::vector<u32> comb(k);
        for (u32 i = 0; i < k; ++i) comb[i] = i;
        do {
            ++rep.subsets_checked;
            if (!rank_condition(g, comb, scheme.field())) {
                ++rep.failures;
                if (rep.first_failure.empty()) rep.first_failure = comb;
            }
        } while (next_combination(comb, scheme.size()));
    }
    return rep;
}

std::optional<std::pair<u32, std::vector<u32>>> rank_break_search(const Scheme& scheme,
                                                                  u32 from_size, u32 to_size,
                                                                  u64 samples_per_size, Rng& rng) {
    GeneratorMatrix g = build_generator(scheme);
    const Field& F = scheme.field();
    const u32 n = scheme.size();
    for (u32 k = from_size; k <= to_size && k <= n; ++k) {
        // structured candidates first: consecutive runs and grid lines
        std::vector<std::vector<u32>> structured;
        for (u32 start = 0; start < n; start += std::max<u32>(1, n / 8)) {
            std::vector<u32> run(k);
            for (u32 i = 0; i < k; ++i) run[i] = (start + i) % n;
            std::sort(run.begin(), run.end());
            structured.push_back(std::move(run));
        }
        for (auto& cand : structured)
            if (!rank_condition(g, cand, F)) return std::make_pair(k, cand);
        for (u64 t = 0; t < samples_per_size; ++t) {
            auto cand = random_subset(n, k, rng);
            if (!rank_condition(g, cand, F)) return std::make_pair(k, cand);
        }
    }
    return std::nullopt;
}

TvReport empirical_privacy_test(const Scheme& scheme, std::span<const u32> coalition,
                                std::span<const u64> secrets_a, std::span<const u64> secrets_b) {
    const Field& F = scheme.field();
    const u64 q = F.q();
    const u32 masks = scheme.derived().mask_count;
    if (q > 31 || masks > 4)
        fail(Err::space_too_large, "privacy test: mask space is not enumerable (need q <= 31, masks <= 4)");

    GeneratorMatrix g = build_generator(scheme);
    const u32 sc = g.secret_cols;
    const u32 k = u32(coalition.size());
    for (u32 id : coalition)
        if (id >= g.rows) fail(Err::out_of_range, "privacy test: client id out of range");

    auto pad = [&](std::span<const u64> s) {
        std::vector<u64> v(sc, 0);
        if (s.size() > sc) fail(Err::too_many_secrets, "privacy test: too many secrets");
        std::copy(s.begin(), s.end(), v.begin());
        return v;
    };
    std::vector<u64> sa = pad(secrets_a), sb = pad(secrets_b);

    // distribution over the coalition's share tuples, keyed canonically
    auto distribution = [&](const std::vector<u64>& s) {
        std::map<std::vector<u64>, u64> hist;
        std::vector<u64> m(masks, 0);
        u64 states = 1;
        for (u32 i = 0; i < masks; ++i) states *= q;
        for (u64 st = 0; st < states; ++st) {
            std::vector<u64> tuple(k);
            for (u32 i = 0; i < k; ++i) {
                u64 acc = 0;
                u32 r = coalition[i];
                for (u32 c = 0; c < sc; ++c) acc = F.add(acc, F.mul(g.at(r, c), s[c]));
                for (u32 c = 0; c < masks; ++c) acc = F.add(acc, F.mul(g.at(r, sc + c), m[c]));
                tuple[i] = acc;
            }
            ++hist[tuple];
            for (u32 i = 0; i < masks; ++i) {
                if (++m[i] < q) break;
                m[i] = 0;
            }
        }
        return std::make_pair(std::move(hist), states);
    };

    auto [ha, states] = distribution(sa);
    auto [hb, states_b] = distribution(sb);
    (void)states_b;

    u64 abs_diff_sum = 0;  // sum over tuples of |count_a - count_b|, exact
    for (const auto& [tuple, ca] : ha) {
        auto it = hb.find(tuple);
        u64 cb = it == hb.end() ? 0 : it->second;
        abs_diff_sum += ca > cb ? ca - cb : cb - ca;
    }
    for (const auto& [tuple, cb] : hb)
        if (!ha.count(tuple)) abs_diff_sum += cb;

    TvReport rep;
    rep.states_enumerated = states;
    rep.exact_zero = (abs_diff_sum == 0);
    rep.tv_distance = 0.5 * double(abs_diff_sum) / double(states);
    return rep;
}

}  // namespace specagg
