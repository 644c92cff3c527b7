#pragma once

#include "ksim/types.hpp"

#include <array>
#include <cstdint>

namespace ksim {

/// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
///
/// Stateless: block(counter, key) is a pure function, which is what makes
/// per-path streams reproducible independent of worker scheduling.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key);
};

/// Sequential random stream for one simulated path.
///
/// The stream identity is (seed, path_index): the Philox key carries the
/// seed, the high counter words carry the path index, and the low counter
/// words advance as blocks are consumed. Draw order within a path is fixed
/// by the stepping code, so ensembles are bit-identical for any worker
/// count.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t path_index);

    /// Uniform draw strictly inside (0, 1): 53-bit resolution, never 0,
    /// so log(u) and log1p(-u) stay finite.
    Scalar uniform01();

    /// Standard normal via Box-Muller; draws a pair, caches the second.
    Scalar gaussian();

private:
    std::uint64_t next_u64();

    Philox4x32::Key key_;
    std::uint64_t path_index_;
    std::uint64_t block_counter_ = 0;
    Philox4x32::Counter buffer_{};
    int buffer_pos_ = 4; // force refill on first draw
    Scalar cached_gaussian_ = 0.0;
    bool have_cached_gaussian_ = false;
};

} // namespace ksim
