#include "ksim/rng.hpp"

#include <cmath>

namespace ksim {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline Philox4x32::Counter round_once(const Philox4x32::Counter& c, const Philox4x32::Key& k) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

} // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
    for (int r = 0; r < 10; ++r) {
        ctr = round_once(ctr, key);
        if (r < 9) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
    }
    return ctr;
}

PathRng::PathRng(std::uint64_t seed, std::uint64_t path_index)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      path_index_(path_index) {}

std::uint64_t PathRng::next_u64() {
    if (buffer_pos_ >= 4) {
        const Philox4x32::Counter ctr = {
            static_cast<std::uint32_t>(block_counter_),
            static_cast<std::uint32_t>(block_counter_ >> 32),
            static_cast<std::uint32_t>(path_index_),
            static_cast<std::uint32_t>(path_index_ >> 32),
        };
        buffer_ = Philox4x32::block(ctr, key_);
        ++block_counter_;
        buffer_pos_ = 0;
    }
    const std::uint64_t lo = buffer_[buffer_pos_];
    const std::uint64_t hi = buffer_[buffer_pos_ + 1];
    buffer_pos_ += 2;
    return (hi << 32) | lo;
}

Scalar PathRng::uniform01() {
    // 53-bit mantissa shifted into (0,1): (m + 0.5) * 2^-53.
    const std::uint64_t m = next_u64() >> 11;
    return (static_cast<Scalar>(m) + 0.5) * 0x1.0p-53;
}

Scalar PathRng::gaussian() {
    if (have_cached_gaussian_) {
        have_cached_gaussian_ = false;
        return cached_gaussian_;
    }
    const Scalar u1 = uniform01();
    const Scalar u2 = uniform01();
    const Scalar r = std::sqrt(-2.0 * std::log(u1));
    const Scalar theta = 2.0 * M_PI * u2;
    cached_gaussian_ = r * std::sin(theta);
    have_cached_gaussian_ = true;
    return r * std::cos(theta);
}

} // namespace ksim
