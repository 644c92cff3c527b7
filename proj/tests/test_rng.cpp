#include "ksim/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

using namespace ksim;

TEST_CASE("Philox4x32-10 known-answer vectors") {
    // Salmon et al., SC'11 reference vectors (also in the Random123 kat file)
    const Philox4x32::Counter zeros =
        Philox4x32::block({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(zeros[0] == 0x6627e8d5u);
    CHECK(zeros[1] == 0xe169c58du);
    CHECK(zeros[2] == 0xbc57ac4cu);
    CHECK(zeros[3] == 0x9b00dbd8u);

    const Philox4x32::Counter ones = Philox4x32::block(
        {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);

    const Philox4x32::Counter pi = Philox4x32::block(
        {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    CHECK(pi[0] == 0xd16cfe09u);
    CHECK(pi[1] == 0x94fdccebu);
    CHECK(pi[2] == 0x5001e420u);
    CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("uniform01 stays strictly inside (0,1)") {
    PathRng rng(7, 123);
    Scalar lo = 1.0, hi = 0.0;
    for (int i = 0; i < 200000; ++i) {
        const Scalar u = rng.uniform01();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    // 2e5 draws explore both tails
    CHECK(lo < 1e-4);
    CHECK(hi > 1.0 - 1e-4);
}

TEST_CASE("uniform01 moments") {
    PathRng rng(99, 0);
    const int n = 200000;
    double s1 = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const Scalar u = rng.uniform01();
        s1 += u;
        s2 += u * u;
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean;
    // se(mean) = 1/sqrt(12 n) ~ 6.5e-4; allow 4 sigma
    CHECK(std::abs(mean - 0.5) < 4.0 / std::sqrt(12.0 * n));
    CHECK(std::abs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("gaussian moments") {
    PathRng rng(5, 17);
    const int n = 200000;
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const Scalar g = rng.gaussian();
        s1 += g;
        s2 += g * g;
        s3 += g * g * g;
        s4 += g * g * g * g;
    }
    const double mean = s1 / n;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
    CHECK(std::abs(s3 / n) < 0.05);      // skewness
    CHECK(std::abs(s4 / n - 3.0) < 0.15); // kurtosis of N(0,1) is 3
}

TEST_CASE("property: streams are pure functions of (seed, path_index), 10^4 cases") {
    PathRng meta(42, 42);
    for (int it = 0; it < 10000; ++it) {
        const auto seed = static_cast<std::uint64_t>(meta.uniform01() * 1e9);
        const auto idx = static_cast<std::uint64_t>(meta.uniform01() * 1e6);
        PathRng a(seed, idx);
        PathRng b(seed, idx);
        const int k = 1 + static_cast<int>(meta.uniform01() * 6.0);
        for (int i = 0; i < k; ++i) REQUIRE(a.uniform01() == b.uniform01());
        REQUIRE(a.gaussian() == b.gaussian());
    }
}

TEST_CASE("distinct path indices give distinct streams") {
    PathRng a(1234, 0);
    PathRng b(1234, 1);
    int equal = 0;
    for (int i = 0; i < 64; ++i)
        if (a.uniform01() == b.uniform01()) ++equal;
    CHECK(equal == 0);

    // and distinct seeds too
    PathRng c(1, 7);
    PathRng d(2, 7);
    equal = 0;
    for (int i = 0; i < 64; ++i)
        if (c.uniform01() == d.uniform01()) ++equal;
    CHECK(equal == 0);
}

TEST_CASE("consecutive blocks of one stream do not repeat") {
    PathRng rng(3, 3);
    std::vector<Scalar> draws(256);
    for (Scalar& v : draws) v = rng.uniform01();
    for (std::size_t i = 1; i < draws.size(); ++i) REQUIRE(draws[i] != draws[i - 1]);
}
