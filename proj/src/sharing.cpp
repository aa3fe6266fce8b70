#include "specagg/sharing.hpp"

#include <algorithm>
#include <functional>

namespace specagg {

u32 Shares::erased_count() const {
    u32 c = 0;
    for (u8 e : erased) c += (e != 0);
    return c;
}

Shares Shares::full(std::vector<u64> v) {
    Shares s;
    s.erased.assign(v.size(), 0);
    s.values = std::move(v);
    return s;
}

Shares Shares::from_pairs(std::span<const std::pair<u32, u64>> pairs, u32 n) {
    Shares s;
    s.values.assign(n, 0);
    s.erased.assign(n, 1);
    for (const auto& [id, v] : pairs) {
        if (id >= n) fail(Err::out_of_range, "shares: client id out of range");
        if (!s.erased[id]) fail(Err::config_error, "shares: duplicate client id");
        s.values[id] = v;
        s.erased[id] = 0;
    }
    return s;
}

namespace {

std::vector<u64> build_signal(std::span<const u64> secrets, const Scheme& scheme,
                              const std::function<u64()>& next_mask) {
    const auto& sets = scheme.sets();
    const u32 n = scheme.size();
    const u64 q = scheme.field().q();
    if (secrets.size() > scheme.derived().s_count)
        fail(Err::too_many_secrets, "share: more secrets than the layout holds");
    for (u64 s : secrets)
        if (s >= q) fail(Err::out_of_range, "share: secret not a canonical field element");

    std::vector<u64> x(n, 0);
    for (u32 slot = 0; slot < sets.secrets.size(); ++slot)
        x[sets.secrets[slot]] = slot < secrets.size() ? secrets[slot] : 0;
    for (u32 f = 0; f < n; ++f)
        if (sets.kind[f] == IndexSets::Kind::mask) x[f] = next_mask();
    return x;
}

}  // namespace

Shares share(std::span<const u64> secrets, const Scheme& scheme, Rng& rng) {
    const u64 q = scheme.field().q();
    auto x = build_signal(secrets, scheme, [&] { return rng.below(q); });
    return Shares::full(scheme.plan().dft(x));
}

Shares share_with_masks(std::span<const u64> secrets, const Scheme& scheme,
                        std::span<const u64> masks) {
    if (masks.size() != scheme.derived().mask_count)
        fail(Err::length_mismatch, "share: mask vector length != mask cell count");
    // build_signal visits mask cells in ascending flat order
    size_t i = 0;
    auto x = build_signal(secrets, scheme, [&] { return masks[i++]; });
    return Shares::full(scheme.plan().dft(x));
}

bool parity_check(const Shares& shares, const Scheme& scheme) {
    if (shares.any_erased()) fail(Err::has_erasures, "parity check: erased positions present");
    if (shares.size() != scheme.size()) fail(Err::length_mismatch, "parity check: wrong length");
    const Field& F = scheme.field();
    const u32 n = scheme.size();
    const u32 fac[2] = {scheme.params().n0, scheme.params().n1};
    const u32 cap[2] = {scheme.derived().z0_rows, scheme.derived().z1_cols};
    const int axes = scheme.params().variant == Variant::product_code ? 2 : 1;
    for (int i = 0; i < axes; ++i) {
        const u32 ni = fac[i];
        const u32 stride = n / ni;
        for (u32 c = 0; c < stride; ++c) {
            for (u32 v = 0; v < cap[i]; ++v) {
                u64 acc = 0;
                for (u32 u = 0; u < ni; ++u)
                    acc = F.add(acc, F.mul(F.root_pow_neg(u64(u) * v % ni * stride),
                                           shares.values[u64(u) * stride + c]));
                if (acc != 0) return false;
            }
        }
    }
    return true;
}

std::vector<u64> rs_erasure_decode(std::span<const LineSymbol> row, std::span<const u64> points,
                                   u32 dim, const Field& F) {
    const u32 n = u32(row.size());
    if (points.size() != n) fail(Err::length_mismatch, "line decode: points length != line length");
    if (dim < 1 || dim > n) fail(Err::config_error, "line decode: bad dimension");
    u32 erased = 0;
    for (const auto& s : row) erased += s.erased;
    if (erased == 0) {
        std::vector<u64> out(n);
        for (u32 u = 0; u < n; ++u) out[u] = row[u].value;
        return out;
    }
    if (erased > n - dim) fail(Err::too_many_erasures, "line decode: erasures exceed capacity");

    // A line with z leading zero rows in the signal domain reads
    // X(u) = p_u * g(p_u) with deg g <= dim-1 at p_u = points[u], so divide
    // the twist out, Lagrange-interpolate g from dim known symbols, check
    // the remaining known ones, and evaluate at the erased positions.
    std::vector<u32> known;
    known.reserve(n - erased);
    for (u32 u = 0; u < n; ++u)
        if (!row[u].erased) known.push_back(u);

    std::vector<u64> xs(dim), ys(dim);
    for (u32 i = 0; i < dim; ++i) {
        u32 u = known[i];
        xs[i] = points[u];
        ys[i] = F.mul(row[u].value, F.inv(points[u]));
    }
    // barycentric-style weights w_i = prod_{j != i} (x_i - x_j)^(-1)
    std::vector<u64> w(dim, 1);
    for (u32 i = 0; i < dim; ++i) {
        u64 prod = 1;
        for (u32 j = 0; j < dim; ++j)
            if (j != i) prod = F.mul(prod, F.sub(xs[i], xs[j]));
        w[i] = F.inv(prod);
    }
    auto eval_g = [&](u64 at) -> u64 {
        // if `at` coincides with a node, return its value directly
        for (u32 i = 0; i < dim; ++i)
            if (xs[i] == at) return ys[i];
        u64 master = 1;
        for (u32 i = 0; i < dim; ++i) master = F.mul(master, F.sub(at, xs[i]));
        u64 acc = 0;
        for (u32 i = 0; i < dim; ++i)
            acc = F.add(acc, F.mul(ys[i], F.mul(w[i], F.inv(F.sub(at, xs[i])))));
        return F.mul(master, acc);
    };

    for (u32 i = dim; i < known.size(); ++i) {
        u32 u = known[i];
        if (F.mul(points[u], eval_g(points[u])) != row[u].value)
            fail(Err::inconsistent_line, "line decode: known symbols are not on one codeword");
    }
    std::vector<u64> out(n);
    for (u32 u = 0; u < n; ++u)
        out[u] = row[u].erased ? F.mul(points[u], eval_g(points[u])) : row[u].value;
    return out;
}

namespace {

// One pass over the lines of axis i (stride N/n_i, length n_i); decodes every
// line whose erasure count is within capacity. Returns true on any progress.
bool peel_axis(Shares& sh, const Scheme& scheme, int axis) {
    const Field& F = scheme.field();
    const u32 n = scheme.size();
    const u32 ni = axis == 0 ? scheme.params().n0 : scheme.params().n1;
    const u32 cap = axis == 0 ? scheme.derived().z0_rows : scheme.derived().z1_cols;
    const u32 stride = n / ni;
    if (cap == 0) return false;
    const u32 dim = ni - cap;

    std::vector<u64> points(ni);
    for (u32 u = 0; u < ni; ++u) points[u] = F.root_pow_neg(u64(u) * stride % n);

    bool progress = false;
    std::vector<LineSymbol> line(ni);
    for (u32 c = 0; c < stride; ++c) {
        u32 missing = 0;
        for (u32 u = 0; u < ni; ++u) {
            u64 f = u64(u) * stride + c;
            line[u] = LineSymbol{sh.values[f], sh.erased[f] != 0};
            missing += sh.erased[f];
        }
        if (missing == 0 || missing > cap) continue;
        auto fixed = rs_erasure_decode(line, points, dim, F);
        for (u32 u = 0; u < ni; ++u) {
            u64 f = u64(u) * stride + c;
            sh.values[f] = fixed[u];
            sh.erased[f] = 0;
        }
        progress = true;
    }
    return progress;
}

}  // namespace

std::optional<std::vector<u64>> recover_shares(const Shares& shares, const Scheme& scheme) {
    if (shares.size() != scheme.size()) fail(Err::length_mismatch, "reconstruct: wrong length");
    Shares work = shares;
    const bool both_axes = scheme.params().variant == Variant::product_code;
    for (u32 it = 0; it < scheme.derived().peel_iters && work.any_erased(); ++it) {
        bool progress = peel_axis(work, scheme, 0);
        if (both_axes) progress = peel_axis(work, scheme, 1) || progress;
        if (!progress) break;
    }
    if (work.any_erased()) return std::nullopt;
    return std::move(work.values);
}

std::optional<std::vector<u64>> reconstruct(const Shares& shares, const Scheme& scheme) {
    auto full = recover_shares(shares, scheme);
    if (!full) return std::nullopt;
    std::vector<u64> x = scheme.plan().idft(*full);
    std::vector<u64> out(scheme.derived().s_count);
    const auto& order = scheme.sets().secrets;
    for (u32 slot = 0; slot < out.size(); ++slot) out[slot] = x[order[slot]];
    return out;
}

}  // namespace specagg
