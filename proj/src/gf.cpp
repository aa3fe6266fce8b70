#include "specagg/gf.hpp"

#include <algorithm>
#include <numeric>

namespace specagg {

namespace {

u64 mulmod(u64 a, u64 b, u64 m) { return u64(u128(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

}  // namespace

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // deterministic witness set for 64-bit integers
    for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
        u64 x = powmod(a % n, d, n);
        if (x == 0 || x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

namespace {

u64 pollard_rho(u64 n, Rng& rng) {
    if ((n & 1) == 0) return 2;
    for (;;) {
        u64 x = rng.below(n - 2) + 2;
        u64 y = x;
        u64 c = rng.below(n - 1) + 1;
        u64 d = 1;
        while (d == 1) {
            x = (mulmod(x, x, n) + c) % n;
            y = (mulmod(y, y, n) + c) % n;
            y = (mulmod(y, y, n) + c) % n;
            d = std::gcd(x > y ? x - y : y - x, n);
        }
        if (d != n) return d;
    }
}

void factor_rec(u64 n, std::vector<u64>& out, Rng& rng) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    for (u64 p = 2; p < 100; ++p) {
        if (n % p == 0) {
            out.push_back(p);
            factor_rec(n / p, out, rng);
            return;
        }
    }
    u64 d = pollard_rho(n, rng);
    factor_rec(d, out, rng);
    factor_rec(n / d, out, rng);
}

}  // namespace

std::vector<u64> factorize(u64 n) {
    std::vector<u64> out;
    Rng rng(0x5eedf00d);
    factor_rec(n, out, rng);
    std::sort(out.begin(), out.end());
    return out;
}

u64 find_field(u64 n, u64 min_q, u64 ceiling) {
    if (n < 1) fail(Err::config_error, "find_field: n must be positive");
    if (min_q < 2) min_q = 2;
    // q ≡ 1 (mod n): scan q = k*n + 1; n = 1 scans every integer.
    u64 q = min_q;
    if (n > 1) {
        u64 rem = (q - 1) % n;
        if (rem != 0) q += n - rem;
    }
    for (; q <= ceiling; q += (n > 1 ? n : 1)) {
        if (is_prime(q)) return q;
    }
    fail(Err::search_exhausted, "find_field: no prime q ≡ 1 (mod " + std::to_string(n) +
                                    ") in [" + std::to_string(min_q) + ", " + std::to_string(ceiling) + "]");
}

Field::Field(u64 q, u64 n) : q_(q), n_(n) {
    if (!is_prime(q)) fail(Err::not_prime, "field: q = " + std::to_string(q) + " is not prime");
    if (n < 1 || (q - 1) % n != 0)
        fail(Err::order_mismatch,
             "field: n = " + std::to_string(n) + " does not divide q-1 = " + std::to_string(q - 1));

    // Find a generator of GF(q)* by trial: g is a generator iff
    // g^((q-1)/p) != 1 for every prime p | q-1.
    std::vector<u64> ps = factorize(q - 1);
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    u64 g = 0;
    for (u64 cand = 2; cand < q; ++cand) {
        bool ok = true;
        for (u64 p : ps) {
            if (powmod(cand, (q - 1) / p, q) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) {
            g = cand;
            break;
        }
    }
    if (g == 0) fail(Err::no_root_found, "field: no generator found for q = " + std::to_string(q));
    omega_ = powmod(g, (q - 1) / n, q);

    // order check: omega^(n/p) != 1 for all prime p | n
    for (u64 p : factorize(n)) {
        if (powmod(omega_, n / p, q) == 1)
            fail(Err::no_root_found, "field: root order is not exactly n");
    }

    omega_pow_.resize(n);
    u64 w = 1;
    for (u64 e = 0; e < n; ++e) {
        omega_pow_[e] = w;
        w = mulmod(w, omega_, q);
    }
    inv_cache_.resize(n + 1);
    inv_cache_[1] = 1;
    for (u64 k = 2; k <= n; ++k) {
        // inverse of k from the standard recurrence inv(k) = -(q/k)*inv(q mod k)
        inv_cache_[k] = mulmod(q - q / k, inv_cache_[q % k], q);
    }
}

u64 Field::pow(u64 a, u64 e) const { return powmod(a, e, q_); }

u64 Field::inv(u64 a) const {
    if (a == 0) fail(Err::divide_by_zero, "field: inverse of zero");
    return powmod(a, q_ - 2, q_);
}

u64 Field::inv_small(u64 k) const {
    if (k == 0) fail(Err::divide_by_zero, "field: inverse of zero");
    if (k < inv_cache_.size()) return inv_cache_[k];
    return inv(k % q_);
}

// ---- Rational ----

namespace {
std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }
}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) fail(Err::config_error, "rational: zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    std::int64_t g = gcd64(n, d);
    if (g == 0) g = 1;
    num = n / g;
    den = d / g;
}

Rational Rational::parse(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(text), 1);
        return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    } catch (const std::exception&) {
        fail(Err::config_error, "rational: cannot parse '" + text + "'");
    }
}

Rational Rational::operator+(const Rational& o) const {
    return Rational(num * o.den + o.num * den, den * o.den);
}

Rational Rational::operator-(const Rational& o) const {
    return Rational(num * o.den - o.num * den, den * o.den);
}

Rational Rational::operator*(const Rational& o) const { return Rational(num * o.num, den * o.den); }

bool Rational::operator<(const Rational& o) const {
    return (__int128)num * o.den < (__int128)o.num * den;
}

std::int64_t Rational::floor_scaled(std::int64_t n) const {
    __int128 p = (__int128)num * n;
    __int128 d = den;
    __int128 qt = p / d;
    if (p % d != 0 && (p < 0)) qt -= 1;
    return (std::int64_t)qt;
}

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

}  // namespace specagg
