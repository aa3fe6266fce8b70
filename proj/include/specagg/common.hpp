#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace specagg {

using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using u128 = unsigned __int128;

enum class Err {
    not_prime,
    order_mismatch,
    no_root_found,
    search_exhausted,
    divide_by_zero,
    length_mismatch,
    has_erasures,
    not_divisor,
    out_of_range,
    degenerate_params,
    too_many_secrets,
    too_many_erasures,
    inconsistent_line,
    invalid_key,
    space_too_large,
    config_error,
    io_error,
};

class Error : public std::runtime_error {
public:
    Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Err code() const { return code_; }

private:
    Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) {
    throw Error(code, what);
}

// splitmix64, used for seed derivation and as the state scrambler.
inline u64 splitmix64(u64& state) {
    u64 z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic RNG (xoshiro256**). std::uniform_int_distribution is not
// portable across standard libraries, so bounded draws are done here by
// rejection sampling; identical seeds give identical streams everywhere.
class Rng {
public:
    explicit Rng(u64 seed) {
        u64 sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    // Derives an independent stream, e.g. per client or per trial.
    Rng fork(u64 tag) {
        u64 sm = next() ^ (tag * 0x9e3779b97f4a7c15ULL);
        return Rng(splitmix64(sm));
    }

    u64 next() {
        u64 result = rotl(s_[1] * 5, 7) * 9;
        u64 t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, bound) by rejection; bound > 0.
    u64 below(u64 bound) {
        u64 threshold = (0 - bound) % bound;
        for (;;) {
            u64 r = next();
            if (r >= threshold) return r % bound;
        }
    }

    double unit() { return (next() >> 11) * 0x1.0p-53; }

private:
    static u64 rotl(u64 x, int k) { return (x << k) | (x >> (64 - k)); }
    u64 s_[4];
};

// Exact rational with 64-bit terms, enough for scheme fractions like 1/10.
// All grid boundaries are floored exactly through this type; floating point
// never touches set construction.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d);
    static Rational parse(const std::string& text);  // "p/q" or integer

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rational& o) const;
    bool operator<=(const Rational& o) const { return *this < o || *this == o; }

    // floor(this * n) for nonnegative n
    std::int64_t floor_scaled(std::int64_t n) const;
    std::string str() const;
};

inline Rational rat(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

}  // namespace specagg
