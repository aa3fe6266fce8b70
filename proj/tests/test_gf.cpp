#include <doctest.h>

#include "specagg/gf.hpp"

using namespace specagg;

TEST_CASE("field construction and worked values") {
    Field f(31, 30);
    CHECK(f.q() == 31);
    // some omega of multiplicative order exactly 30
    u64 w = f.omega();
    u64 acc = 1;
    for (int k = 1; k < 30; ++k) {
        acc = f.mul(acc, w);
        CHECK(acc != 1);
    }
    CHECK(f.mul(acc, w) == 1);

    CHECK(f.add(30, 5) == 4);
    CHECK(f.inv(2) == 16);
    CHECK(f.pow(3, 30) == 1);  // Fermat
    CHECK(f.sub(3, 7) == 27);
    CHECK(f.neg(0) == 0);
    CHECK(f.neg(1) == 30);
}

TEST_CASE("field errors") {
    CHECK_THROWS_AS(Field(30, 29), Error);          // not prime
    CHECK_THROWS_AS(Field(31, 7), Error);           // 7 does not divide 30
    CHECK_THROWS_AS(Field(31, 30).inv(0), Error);   // divide by zero
    Field f131(131, 130);
    CHECK(f131.pow(f131.omega(), 130) == 1);
}

TEST_CASE("find_field worked values") {
    CHECK(find_field(30, 2) == 31);
    CHECK(find_field(130, 2) == 131);
    CHECK(find_field(1, 2) == 2);
    CHECK(find_field(130, 33151) == 33151);
    CHECK_THROWS_AS(find_field(4, 2, 3), Error);  // ceiling too low
}

TEST_CASE("arithmetic properties, randomized") {
    Field f(33151, 130);
    Rng rng(42);
    for (int t = 0; t < 10000; ++t) {
        u64 a = rng.below(f.q()), b = rng.below(f.q()), c = rng.below(f.q());
        CHECK(f.add(a, b) == f.add(b, a));
        CHECK(f.mul(a, b) == f.mul(b, a));
        CHECK(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)));
        CHECK(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
        CHECK(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
        if (a != 0) CHECK(f.mul(a, f.inv(a)) == 1);
        CHECK(f.add(a, f.neg(a)) == 0);
    }
}

TEST_CASE("root order is exact for a spread of sizes") {
    for (u64 n : {2ULL, 6ULL, 30ULL, 130ULL, 210ULL, 240ULL, 1680ULL, 10080ULL}) {
        u64 q = find_field(n, 2 * n);
        Field f(q, n);
        u64 acc = 1;
        for (u64 k = 1; k < n; ++k) {
            acc = f.mul(acc, f.omega());
            REQUIRE(acc != 1);
        }
        CHECK(f.mul(acc, f.omega()) == 1);
    }
}

TEST_CASE("inv_small cache matches inv") {
    Field f(131, 130);
    for (u64 k = 1; k <= 130; ++k) CHECK(f.inv_small(k) == f.inv(k));
}

TEST_CASE("factorize") {
    CHECK(factorize(130) == std::vector<u64>{2, 5, 13});
    CHECK(factorize(1) == std::vector<u64>{});
    CHECK(factorize(97) == std::vector<u64>{97});
    CHECK(factorize(1024) == std::vector<u64>(10, 2));
}

TEST_CASE("rational floors are exact") {
    Rational d0(1, 10);
    CHECK(d0.floor_scaled(10) == 1);
    CHECK(d0.floor_scaled(13) == 1);
    Rational r = (rat(1) - rat(1, 2)) * (rat(1) - rat(1, 2)) * (rat(9, 10));
    CHECK(r.floor_scaled(130) == 29);  // 0.225 * 130 = 29.25
    CHECK(Rational::parse("1/4") == Rational(1, 4));
    CHECK(Rational::parse("3") == Rational(3, 1));
    CHECK_THROWS_AS(Rational::parse("x/y"), Error);
    CHECK(Rational(26, 4).str() == "13/2");
}
