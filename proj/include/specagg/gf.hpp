#pragma once

#include <vector>

#include "specagg/common.hpp"

namespace specagg {

bool is_prime(u64 n);

// Prime factorization (Miller-Rabin + Pollard rho), sorted, with multiplicity.
std::vector<u64> factorize(u64 n);

// Smallest prime q >= min_q with q ≡ 1 (mod n), so GF(q)* has an element of
// order n. Throws search_exhausted past `ceiling`.
u64 find_field(u64 n, u64 min_q, u64 ceiling = (u64(1) << 62));

// Prime field GF(q) together with a primitive n-th root of unity.  Immutable
// after construction and safe to share across threads; every operation is a
// pure function of canonical representatives in [0, q).
class Field {
public:
    // Requires q prime and n | q-1; finds omega = g^((q-1)/n) for a generator
    // g of GF(q)* and verifies its multiplicative order is exactly n.
    Field(u64 q, u64 n);

    u64 q() const { return q_; }
    u64 n() const { return n_; }
    u64 omega() const { return omega_; }

    u64 add(u64 a, u64 b) const {
        u64 s = a + b;
        return s >= q_ ? s - q_ : s;
    }
    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + q_ - b; }
    u64 neg(u64 a) const { return a == 0 ? 0 : q_ - a; }
    u64 mul(u64 a, u64 b) const { return u64(u128(a) * b % q_); }
    u64 pow(u64 a, u64 e) const;
    u64 inv(u64 a) const;

    // omega^e for e in [0, n), from the precomputed table.
    u64 root_pow(u64 e) const { return omega_pow_[e % n_]; }
    // omega^{-e}
    u64 root_pow_neg(u64 e) const { return omega_pow_[(n_ - e % n_) % n_]; }

    // Cached inverse of k for 1 <= k <= n (covers 1/n_i and 1/N factors).
    u64 inv_small(u64 k) const;

    bool operator==(const Field& o) const { return q_ == o.q_ && n_ == o.n_ && omega_ == o.omega_; }

private:
    u64 q_;
    u64 n_;
    u64 omega_;
    std::vector<u64> omega_pow_;  // omega^0 .. omega^{n-1}
    std::vector<u64> inv_cache_;  // inv_cache_[k] = k^{-1}, k in [1, n]
};

}  // namespace specagg
