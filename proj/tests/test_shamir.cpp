#include <doctest.h>

#include <numeric>

#include "specagg/shamir.hpp"

using namespace specagg;

namespace {

ShamirParams make(u32 n, u32 s, u32 t, u64 q) {
    ShamirParams p;
    p.n = n;
    p.s_count = s;
    p.t_count = t;
    p.q = q;
    return p;
}

Shares keep_only(const Shares& full, const std::vector<u32>& ids) {
    Shares s;
    s.values.assign(full.values.size(), 0);
    s.erased.assign(full.values.size(), 1);
    for (u32 id : ids) {
        s.values[id] = full.values[id];
        s.erased[id] = 0;
    }
    return s;
}

}  // namespace

TEST_CASE("degree zero: constant polynomial shares") {
    ShamirParams p = make(5, 1, 0, 31);
    Rng rng(1);
    std::vector<u64> s{7};
    Shares sh = shamir_share(s, p, rng);
    for (u64 v : sh.values) CHECK(v == 7);
    CHECK(*shamir_recon(sh, p) == s);
}

TEST_CASE("random subsets of size S+T reconstruct") {
    ShamirParams p = make(12, 3, 2, 131);
    Rng rng(2);
    for (int t = 0; t < 50; ++t) {
        std::vector<u64> s{rng.below(131), rng.below(131), rng.below(131)};
        Shares sh = shamir_share(s, p, rng);
        std::vector<u32> ids(12);
        std::iota(ids.begin(), ids.end(), 0);
        for (int k = 0; k < 7; ++k) ids.erase(ids.begin() + rng.below(ids.size()));
        REQUIRE(ids.size() == 5);
        auto got = shamir_recon(keep_only(sh, ids), p);
        REQUIRE(got.has_value());
        CHECK(*got == s);
    }
}

TEST_CASE("exhaustive worst case: every subset of size S+T recovers (N <= 12)") {
    for (auto [n, s_cnt, t_cnt] : {std::tuple<u32, u32, u32>{8, 2, 2}, {12, 3, 3}}) {
        ShamirParams p = make(n, s_cnt, t_cnt, 131);
        Rng rng(3);
        std::vector<u64> s(s_cnt);
        for (auto& v : s) v = rng.below(131);
        Shares sh = shamir_share(s, p, rng);
        u32 need = s_cnt + t_cnt;
        // iterate all n-choose-need subsets via bitmasks
        for (u32 mask = 0; mask < (1u << n); ++mask) {
            if (u32(__builtin_popcount(mask)) != need) continue;
            std::vector<u32> ids;
            for (u32 i = 0; i < n; ++i)
                if (mask & (1u << i)) ids.push_back(i);
            auto got = shamir_recon(keep_only(sh, ids), p);
            REQUIRE(got.has_value());
            REQUIRE(*got == s);
        }
    }
}

TEST_CASE("fewer than S+T shares give bottom; all N give the secrets") {
    ShamirParams p = make(10, 2, 3, 131);
    Rng rng(4);
    std::vector<u64> s{5, 9};
    Shares sh = shamir_share(s, p, rng);
    CHECK(!shamir_recon(keep_only(sh, {0, 1, 2, 3}), p).has_value());
    CHECK(*shamir_recon(sh, p) == s);
}

TEST_CASE("distinct randomness, same reconstruction") {
    ShamirParams p = make(9, 2, 2, 131);
    Rng r1(5), r2(6);
    std::vector<u64> s{17, 3};
    Shares a = shamir_share(s, p, r1);
    Shares b = shamir_share(s, p, r2);
    CHECK(a.values != b.values);
    CHECK(*shamir_recon(a, p) == *shamir_recon(b, p));
}

TEST_CASE("linearity of the baseline") {
    ShamirParams p = make(10, 3, 2, 131);
    Rng rng(7);
    std::vector<u64> s1{1, 2, 3}, s2{10, 20, 30};
    Shares a = shamir_share(s1, p, rng);
    Shares b = shamir_share(s2, p, rng);
    Shares sum = a;
    for (u32 i = 0; i < 10; ++i) sum.values[i] = (a.values[i] + b.values[i]) % 131;
    auto got = shamir_recon(sum, p);
    REQUIRE(got.has_value());
    CHECK(*got == std::vector<u64>{11, 22, 33});
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(shamir_recon(Shares::full(std::vector<u64>(5, 0)), make(5, 3, 3, 31)), Error);
    CHECK_THROWS_AS(shamir_recon(Shares::full(std::vector<u64>(40, 0)), make(40, 2, 2, 31)), Error);
    ShamirParams bad = make(5, 2, 1, 31);
    bad.eval_points = {1, 2, 3, 4, 4};
    Rng rng(8);
    CHECK_THROWS_AS(shamir_share(std::vector<u64>{1, 2}, bad, rng), Error);
}
