#include "vref/rng.hpp"

#include <cmath>
#include <numbers>

namespace vref {

namespace {

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::array<std::uint32_t, 4> c,
                                               std::array<std::uint32_t, 2> k) {
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(m0, c[0], hi0, lo0);
        mulhilo(m1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += w0;
        k[1] += w1;
    }
    return c;
}

double NormalStream::next() {
    if (have_cached_) {
        have_cached_ = false;
        return cached_;
    }
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(pair_index_), static_cast<std::uint32_t>(pair_index_ >> 32),
        static_cast<std::uint32_t>(run_), static_cast<std::uint32_t>(run_ >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                              static_cast<std::uint32_t>(seed_ >> 32)};
    const auto out = Philox4x32::block(ctr, key);
    ++pair_index_;

    const std::uint64_t x0 = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    const std::uint64_t x1 = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    const double u1 = ((x0 >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = (x1 >> 11) * 0x1.0p-53;        // [0, 1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
}

}  // namespace vref
