#include "specagg/shamir.hpp"

#include <algorithm>

namespace specagg {

void ShamirParams::validate() const {
    if (n < 1 || s_count < 1) fail(Err::degenerate_params, "shamir: need n >= 1 and s_count >= 1");
    if (u64(s_count) + t_count > n)
        fail(Err::degenerate_params, "shamir: s_count + t_count exceeds n");
    if (!is_prime(q)) fail(Err::not_prime, "shamir: q is not prime");
    if (eval_points.empty() && q <= n)
        fail(Err::degenerate_params, "shamir: default points 1..n need q > n");
    if (!eval_points.empty()) {
        if (eval_points.size() != n) fail(Err::length_mismatch, "shamir: wrong point count");
        auto sorted = eval_points;
        std::sort(sorted.begin(), sorted.end());
        for (size_t i = 0; i < sorted.size(); ++i) {
            if (sorted[i] == 0 || sorted[i] >= q)
                fail(Err::degenerate_params, "shamir: points must be nonzero canonical elements");
            if (i && sorted[i] == sorted[i - 1])
                fail(Err::degenerate_params, "shamir: points must be distinct");
        }
    }
}

std::vector<u64> ShamirParams::points() const {
    if (!eval_points.empty()) return eval_points;
    std::vector<u64> pts(n);
    for (u32 i = 0; i < n; ++i) pts[i] = i + 1;
    return pts;
}

namespace {

u64 horner(const std::vector<u64>& coeffs, u64 at, u64 q) {
    u64 acc = 0;
    for (size_t i = coeffs.size(); i-- > 0;) acc = (u128(acc) * at + coeffs[i]) % q;
    return acc;
}

}  // namespace

Shares shamir_share(std::span<const u64> secrets, const ShamirParams& p, Rng& rng) {
    p.validate();
    if (secrets.size() > p.s_count) fail(Err::too_many_secrets, "shamir: too many secrets");
    std::vector<u64> coeffs(p.s_count + p.t_count, 0);
    for (size_t i = 0; i < secrets.size(); ++i) {
        if (secrets[i] >= p.q) fail(Err::out_of_range, "shamir: secret not canonical");
        coeffs[i] = secrets[i];
    }
    for (u32 i = 0; i < p.t_count; ++i) coeffs[p.s_count + i] = rng.below(p.q);

    auto pts = p.points();
    std::vector<u64> vals(p.n);
    for (u32 i = 0; i < p.n; ++i) vals[i] = horner(coeffs, pts[i], p.q);
    return Shares::full(std::move(vals));
}

std::optional<std::vector<u64>> shamir_recon(const Shares& shares, const ShamirParams& p) {
    p.validate();
    if (shares.size() != p.n) fail(Err::length_mismatch, "shamir: wrong share count");
    const u32 need = p.s_count + p.t_count;
    std::vector<u32> present;
    for (u32 i = 0; i < p.n; ++i)
        if (!shares.erased[i]) present.push_back(i);
    if (present.size() < need) return std::nullopt;
    present.resize(need);

    // O(need^2) coefficient-form Lagrange: master polynomial M(x), then for
    // each node synthetic-divide M by (x - x_i) and scale by y_i / M'(x_i).
    const u64 q = p.q;
    auto pts = p.points();
    auto sub = [q](u64 a, u64 b) { return a >= b ? a - b : a + q - b; };
    auto mul = [q](u64 a, u64 b) { return u64(u128(a) * b % q); };
    auto inv = [q, mul](u64 a) {
        u64 r = 1, base = a, e = q - 2;
        while (e) {
            if (e & 1) r = mul(r, base);
            base = mul(base, base);
            e >>= 1;
        }
        return r;
    };

    // master polynomial M(x) = prod_k (x - x_k)
    std::vector<u64> master{1};
    for (u32 k = 0; k < need; ++k) {
        u64 xk = pts[present[k]];
        std::vector<u64> nxt(master.size() + 1, 0);
        for (size_t j = 0; j < master.size(); ++j) {
            nxt[j + 1] = (nxt[j + 1] + master[j]) % q;
            nxt[j] = (nxt[j] + mul(master[j], sub(0, xk))) % q;
        }
        master = std::move(nxt);
    }

    std::vector<u64> coeffs(need, 0);
    std::vector<u64> quotient(need);
    for (u32 k = 0; k < need; ++k) {
        u64 xk = pts[present[k]];
        u64 yk = shares.values[present[k]];
        // synthetic division: master / (x - xk)
        u64 carry = 0;
        for (size_t j = master.size(); j-- > 1;) {
            u64 c = (master[j] + carry) % q;
            quotient[j - 1] = c;
            carry = mul(c, xk);
        }
        // denominator = quotient evaluated at xk (= M'(xk))
        u64 denom = 0;
        for (size_t j = quotient.size(); j-- > 0;) denom = (mul(denom, xk) + quotient[j]) % q;
        u64 scale = mul(yk, inv(denom));
        for (u32 j = 0; j < need; ++j) coeffs[j] = (coeffs[j] + mul(quotient[j], scale)) % q;
    }

    coeffs.resize(p.s_count);
    return coeffs;
}

}  // namespace specagg
