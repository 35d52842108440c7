#pragma once

#include <cmath>
#include <cstdint>

namespace npvq {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
}

} // namespace detail

// Self-contained xoshiro256** generator. Training and corpus synthesis draw
// every random number through this class so that a (seed, input) pair gives
// the same result on any platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = detail::splitmix64(s);
    }

    std::uint64_t next_u64() {
        std::uint64_t* s = state_;
        const std::uint64_t result = detail::rotl64(s[1] * 5, 7) * 9;
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = detail::rotl64(s[3], 45);
        return result;
    }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // standard normal (Box-Muller, cached spare)
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // uniform integer in [0, n), n > 0
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Derives independent child seeds; used to give each speaker, Lloyd
// iteration and cluster its own stream regardless of the order or
// parallelism in which they are processed.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
    std::uint64_t x = base ^ (0x9e3779b97f4a7c15ull + (salt << 1));
    std::uint64_t a = detail::splitmix64(x);
    x ^= salt * 0xff51afd7ed558ccdull;
    return a ^ detail::splitmix64(x);
}

} // namespace npvq
