#include "specagg/fft.hpp"

#include <numeric>

namespace specagg {

namespace {

std::vector<u32> prime_factors(u32 n) {
    std::vector<u32> f;
    for (u32 p = 2; u64(p) * p <= n; ++p) {
        while (n % p == 0) {
            f.push_back(p);
            n /= p;
        }
    }
    if (n > 1) f.push_back(n);
    return f;
}

// out[k] = sum_{j<n} pw[(j*k*rootstep) mod period] * in[j*instride]
// work is caller-provided, size >= n, disjoint from out; out doubles as the
// sub-calls' work area (classic out/work ping-pong, no allocation).
void dft_rec(const Field& F, const u64* in, u32 instride, u64* out, u64* work, u32 n,
             u32 rootstep, const u32* fac, const u32* fac_end, const std::vector<u64>& pw,
             u32 period) {
    if (n == 1) {
        out[0] = in[0];
        return;
    }
    u32 p = fac < fac_end ? *fac : n;
    u32 m = n / p;
    if (m == 1) {
        // prime-length kernel, O(p^2)
        for (u32 k = 0; k < p; ++k) {
            u64 acc = 0;
            u64 idx = 0;
            u64 step = u64(k) * rootstep % period;
            for (u32 j = 0; j < p; ++j) {
                acc = F.add(acc, F.mul(pw[idx], in[u64(j) * instride]));
                idx += step;
                if (idx >= period) idx -= period;
            }
            out[k] = acc;
        }
        return;
    }
    for (u32 r = 0; r < p; ++r) {
        dft_rec(F, in + u64(r) * instride, instride * p, work + u64(r) * m, out, m,
                rootstep * p, fac + 1, fac_end, pw, period);
    }
    for (u32 k = 0; k < n; ++k) {
        u64 acc = 0;
        u64 idx = 0;
        u64 step = u64(k) * rootstep % period;
        for (u32 r = 0; r < p; ++r) {
            acc = F.add(acc, F.mul(pw[idx], work[u64(r) * m + (k % m)]));
            idx += step;
            if (idx >= period) idx -= period;
        }
        out[k] = acc;
    }
}

}  // namespace

DftPlan::DftPlan(const Field& field, u32 n0, u32 n1) : field_(&field), n0_(n0), n1_(n1) {
    if (n0 < 1 || n1 < 1 || std::gcd(n0, n1) != 1)
        fail(Err::config_error, "dft plan: n0, n1 must be positive and coprime");
    n_ = n0 * n1;
    if (field.n() != n_) fail(Err::order_mismatch, "dft plan: field root order != n0*n1");

    // CRT idempotents: e0 ≡ 1 (mod n0), 0 (mod n1); e1 the other way round.
    u64 inv_n1_mod_n0 = 0, inv_n0_mod_n1 = 0;
    for (u64 t = 0; t < n0; ++t)
        if (t * n1 % n0 == 1) inv_n1_mod_n0 = t;
    for (u64 t = 0; t < n1; ++t)
        if (t * n0 % n1 == 1) inv_n0_mod_n1 = t;
    u64 e0 = u64(n1) * inv_n1_mod_n0 % n_;
    u64 e1 = u64(n0) * inv_n0_mod_n1 % n_;

    grid_to_flat_.resize(u64(n0) * n1);
    for (u32 a = 0; a < n0; ++a)
        for (u32 b = 0; b < n1; ++b) grid_to_flat_[u64(a) * n1 + b] = u32((a * e0 + b * e1) % n_);

    auto build = [&](u64 exponent, u32 len, std::vector<u64>& fwd, std::vector<u64>& inv) {
        fwd.resize(len);
        inv.resize(len);
        for (u32 e = 0; e < len; ++e) {
            fwd[e] = field.root_pow(exponent * e % n_);
            inv[e] = field.root_pow_neg(exponent * e % n_);
        }
    };
    build(e0, n0, col_root_, col_root_inv_);
    build(e1, n1, row_root_, row_root_inv_);
    col_factors_ = prime_factors(n0);
    row_factors_ = prime_factors(n1);
}

std::vector<u64> DftPlan::dft(const std::vector<u64>& x) const {
    if (x.size() != n_) fail(Err::length_mismatch, "dft: input length != N");
    const Field& F = *field_;
    std::vector<u64> grid(n_), tmp(n_), colin(n0_), colout(n0_);
    std::vector<u64> work(std::max(n0_, n1_));
    for (u32 a = 0; a < n0_; ++a)
        for (u32 b = 0; b < n1_; ++b) grid[u64(a) * n1_ + b] = x[crt_flat(a, b)];
    for (u32 a = 0; a < n0_; ++a)
        dft_rec(F, &grid[u64(a) * n1_], 1, &tmp[u64(a) * n1_], work.data(), n1_, 1,
                row_factors_.data(), row_factors_.data() + row_factors_.size(), row_root_, n1_);
    std::vector<u64> out(n_);
    for (u32 b = 0; b < n1_; ++b) {
        for (u32 a = 0; a < n0_; ++a) colin[a] = tmp[u64(a) * n1_ + b];
        dft_rec(F, colin.data(), 1, colout.data(), work.data(), n0_, 1, col_factors_.data(),
                col_factors_.data() + col_factors_.size(), col_root_, n0_);
        for (u32 a = 0; a < n0_; ++a) out[crt_flat(a, b)] = colout[a];
    }
    return out;
}

std::vector<u64> DftPlan::idft(const std::vector<u64>& X) const {
    if (X.size() != n_) fail(Err::length_mismatch, "idft: input length != N");
    const Field& F = *field_;
    std::vector<u64> grid(n_), tmp(n_), colin(n0_), colout(n0_);
    std::vector<u64> work(std::max(n0_, n1_));
    for (u32 a = 0; a < n0_; ++a)
        for (u32 b = 0; b < n1_; ++b) grid[u64(a) * n1_ + b] = X[crt_flat(a, b)];
    for (u32 a = 0; a < n0_; ++a)
        dft_rec(F, &grid[u64(a) * n1_], 1, &tmp[u64(a) * n1_], work.data(), n1_, 1,
                row_factors_.data(), row_factors_.data() + row_factors_.size(), row_root_inv_, n1_);
    std::vector<u64> out(n_);
    u64 n_inv = F.inv_small(n_);
    for (u32 b = 0; b < n1_; ++b) {
        for (u32 a = 0; a < n0_; ++a) colin[a] = tmp[u64(a) * n1_ + b];
        dft_rec(F, colin.data(), 1, colout.data(), work.data(), n0_, 1, col_factors_.data(),
                col_factors_.data() + col_factors_.size(), col_root_inv_, n0_);
        for (u32 a = 0; a < n0_; ++a) out[crt_flat(a, b)] = F.mul(colout[a], n_inv);
    }
    return out;
}

bool subsample_alias_check(const std::vector<u64>& x, u32 n, const DftPlan& plan) {
    const Field& F = plan.field();
    u32 N = plan.size();
    if (x.size() != N) fail(Err::length_mismatch, "alias check: input length != N");
    if (n == 0 || N % n != 0) fail(Err::not_divisor, "alias check: n does not divide N");
    u32 m = N / n;  // subsampled length

    std::vector<u64> X = plan.dft(x);

    // left side: m-point DFT of the subsampled signal, generated by omega^n
    std::vector<u64> sub(m);
    for (u32 i = 0; i < m; ++i) sub[i] = x[u64(i) * n % N];
    u64 inv_n = F.inv_small(n);
    for (u32 j = 0; j < m; ++j) {
        u64 lhs = 0;
        for (u32 i = 0; i < m; ++i) lhs = F.add(lhs, F.mul(F.root_pow(u64(n) * i % N * j % N), sub[i]));
        u64 rhs = 0;
        for (u32 k = j; k < N; k += m) rhs = F.add(rhs, X[k]);
        rhs = F.mul(rhs, inv_n);
        if (lhs != rhs) return false;
    }
    return true;
}

}  // namespace specagg
