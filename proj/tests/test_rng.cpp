#include <doctest.h>

#include <cmath>
#include <set>

#include "nonlocal/rng.hpp"

using namespace nonlocal;

// Known-answer vectors published with the Random123 reference implementation.
TEST_CASE("philox4x32-10 known answers") {
    const auto z = philox4x32_10({0, 0, 0, 0}, {0, 0});
    CHECK(z == PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    const auto f = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(f == PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    const auto p = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    CHECK(p == PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct") {
    RandomStream a(42, stream_id(1, 2)), b(42, stream_id(1, 2)), c(42, stream_id(2, 1));
    int same_c = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.next_u32();
        CHECK(x == b.next_u32());
        same_c += x == c.next_u32();
    }
    CHECK(same_c < 3);
    CHECK(stream_id(1, 2) != stream_id(2, 1));
    CHECK(stream_id(1) != stream_id(1, 0, 1));
}

TEST_CASE("uniform and exponential moments") {
    RandomStream r(7, 0);
    const int n = 200000;
    double su = 0, se = 0, se2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        su += u;
        const double e = r.exponential();
        se += e;
        se2 += e * e;
    }
    CHECK(std::abs(su / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
    CHECK(std::abs(se / n - 1.0) < 4 * std::sqrt(1.0 / n));
    CHECK(std::abs(se2 / n - 2.0) < 4 * std::sqrt(20.0 / n));
}

TEST_CASE("below is unbiased on small ranges") {
    RandomStream r(3, 9);
    std::array<int, 3> counts{};
    for (int i = 0; i < 30000; ++i) ++counts[r.below(3)];
    for (int c : counts) CHECK(std::abs(c - 10000) < 400);
}
