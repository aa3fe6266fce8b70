#include <doctest.h>

#include "fixtures.hpp"
#include "specagg/audit.hpp"
#include "specagg/sharing.hpp"

using namespace specagg;

TEST_CASE("generator matrix matches the sharing map exactly") {
    Scheme sch = fixtures::n30_scheme_s4();
    const Field& F = sch.field();
    GeneratorMatrix g = build_generator(sch);
    CHECK(g.rows == 30);
    CHECK(g.cols == 30 - 10);  // K = N - |Z0 ∪ Z1| = 30 - (6 + 5 - 1)
    CHECK(g.secret_cols == 4);

    Rng rng(40);
    std::vector<u64> s(4), m(sch.derived().mask_count);
    for (auto& v : s) v = rng.below(F.q());
    for (auto& v : m) v = rng.below(F.q());
    Shares sh = share_with_masks(s, sch, m);
    for (u32 r = 0; r < 30; ++r) {
        u64 acc = 0;
        for (u32 c = 0; c < g.secret_cols; ++c) acc = F.add(acc, F.mul(g.at(r, c), s[c]));
        for (u32 c = 0; c < m.size(); ++c) acc = F.add(acc, F.mul(g.at(r, g.secret_cols + c), m[c]));
        CHECK(acc == sh.values[r]);
    }

    // all-zero input maps to all-zero shares
    Shares zero = share_with_masks(std::vector<u64>(4, 0), sch, std::vector<u64>(m.size(), 0));
    CHECK(zero.values == std::vector<u64>(30, 0));
}

TEST_CASE("rank of known matrices") {
    Field F(31, 30);
    // identity 3x3
    std::vector<u64> id{1, 0, 0, 0, 1, 0, 0, 0, 1};
    CHECK(rank_gf(id, 3, 3, F) == 3);
    // dependent rows
    std::vector<u64> dep{1, 2, 2, 4, 3, 6};
    CHECK(rank_gf(dep, 3, 2, F) == 1);
    std::vector<u64> zero(12, 0);
    CHECK(rank_gf(zero, 3, 4, F) == 0);
}

TEST_CASE("empty coalition trivially satisfies the rank condition") {
    Scheme sch = fixtures::n30_scheme_s4();
    GeneratorMatrix g = build_generator(sch);
    CHECK(rank_condition(g, std::vector<u32>{}, sch.field()));
}

TEST_CASE("exhaustive audit at N=30 finds no leak through size 4") {
    Scheme sch = fixtures::n30_scheme_s4();
    RankAuditReport rep = rank_audit_exhaustive(sch, 4);
    CHECK(rep.exhaustive);
    CHECK(rep.subsets_checked == 30ULL + 435 + 4060 + 27405);
    CHECK(rep.failures == 0);
}

TEST_CASE("sampled audit at N=130 and threshold size") {
    Scheme sch = Scheme::build(fixtures::n130_params());
    Rng rng(41);
    RankAuditReport rep = rank_audit(sch, sch.derived().t_count, 200, rng);
    CHECK(rep.subsets_checked == 200);
    CHECK(rep.failures == 0);
}

TEST_CASE("a full-rank coalition breaks the condition eventually") {
    Scheme sch = fixtures::tiny_scheme();
    // with 3 mask columns, any coalition of 4 rows has rank 4 > rank(G2) <= 3
    Rng rng(42);
    auto broken = rank_break_search(sch, 4, 6, 50, rng);
    REQUIRE(broken.has_value());
    CHECK(broken->first == 4);
    GeneratorMatrix g = build_generator(sch);
    CHECK(!rank_condition(g, broken->second, sch.field()));
}

TEST_CASE("tiny instance: exhaustive rank audit through the mask rank") {
    Scheme sch = fixtures::tiny_scheme();
    RankAuditReport rep = rank_audit_exhaustive(sch, 3);
    CHECK(rep.failures == 0);
    CHECK(rep.subsets_checked == 10ULL + 45 + 120);
}

TEST_CASE("exact distribution privacy on the tiny instance") {
    Scheme sch = fixtures::tiny_scheme();
    std::vector<u64> sa{3}, sb{8};

    // every coalition within the certified threshold sees identical
    // distributions (TV exactly zero)
    for (u32 k = 1; k <= 3; ++k) {
        std::vector<u32> comb(k);
        for (u32 i = 0; i < k; ++i) comb[i] = i;
        do {
            TvReport rep = empirical_privacy_test(sch, comb, sa, sb);
            REQUIRE(rep.exact_zero);
        } while ([&] {
            for (u32 i = k; i-- > 0;) {
                if (comb[i] < 10 - (k - i)) {
                    ++comb[i];
                    for (u32 j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
                    return true;
                }
            }
            return false;
        }());
    }

    // the full set of shares determines the secret: TV > 0
    std::vector<u32> all(10);
    for (u32 i = 0; i < 10; ++i) all[i] = i;
    TvReport rep = empirical_privacy_test(sch, all, sa, sb);
    CHECK(!rep.exact_zero);
    CHECK(rep.tv_distance > 0.0);

    // identical secrets give TV 0 for any coalition
    TvReport same = empirical_privacy_test(sch, all, sa, sa);
    CHECK(same.exact_zero);
}

TEST_CASE("privacy test refuses non-enumerable instances") {
    Scheme sch = fixtures::n30_scheme_s4();  // 16 mask cells
    std::vector<u32> p{0};
    CHECK_THROWS_AS(empirical_privacy_test(sch, p, std::vector<u64>{1}, std::vector<u64>{2}), Error);
}

TEST_CASE("rank condition certifies zero leakage") {
    Scheme sch = fixtures::tiny_scheme();
    GeneratorMatrix g = build_generator(sch);
    Rng rng(43);
    std::vector<u64> sa{5}, sb{9};
    for (int t = 0; t < 30; ++t) {
        u32 k = 1 + u32(rng.below(4));
        std::vector<u32> ids(10);
        for (u32 i = 0; i < 10; ++i) ids[i] = i;
        for (u32 i = 0; i < k; ++i) std::swap(ids[i], ids[i + rng.below(10 - i)]);
        ids.resize(k);
        bool cert = rank_condition(g, ids, sch.field());
        TvReport rep = empirical_privacy_test(sch, ids, sa, sb);
        if (cert) CHECK(rep.exact_zero);
    }
}
