#pragma once

#include <array>
#include <cstdint>

namespace nonlocal {

// Philox4x32-10 block function (Salmon et al. 2011).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

std::uint64_t splitmix64(std::uint64_t x);

// Combines identifiers into a 64-bit stream id; order matters.
std::uint64_t stream_id(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

// Counter-based stream keyed by (seed, stream). Two streams with different
// ids never share blocks, so per-path streams are independent of scheduling.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream);

    std::uint32_t next_u32();
    // Uniform on the open interval (0,1), 53-bit resolution.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double exponential() ;
    // +1 or -1 with equal probability.
    double sign() { return (next_u32() & 1u) ? 1.0 : -1.0; }
    std::uint64_t below(std::uint64_t n);
    double normal();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    PhiloxCounter buf_{};
    int pos_ = 4;
};

}  // namespace nonlocal
