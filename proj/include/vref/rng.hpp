#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace vref {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11 reference
/// constants). Stateless: the same (counter, key) always yields the same
/// block, so independent substreams are just disjoint counter ranges.
struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                              std::array<std::uint32_t, 2> key);
};

inline constexpr const char* rng_algorithm_name = "philox4x32-10/box-muller";

/// Deterministic stream of standard normal draws for one Monte-Carlo run.
/// Counter layout: {draw_pair_index_lo, draw_pair_index_hi, run_lo, run_hi};
/// key = {seed_lo, seed_hi}. Each block yields two uniforms
/// u1 = ((x0 >> 11) + 1) * 2^-53 in (0, 1], u2 = (x1 >> 11) * 2^-53 in
/// [0, 1), mapped by Box-Muller to two normals:
///   z0 = sqrt(-2 ln u1) cos(2 pi u2),  z1 = sqrt(-2 ln u1) sin(2 pi u2).
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t run) : seed_(seed), run_(run) {}
    double next();

private:
    std::uint64_t seed_;
    std::uint64_t run_;
    std::uint64_t pair_index_ = 0;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace vref
