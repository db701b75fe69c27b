#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <string_view>

namespace edgesim {

// splitmix64, used for seed mixing and stateless hash draws.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t s = seed ^ (salt + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
    return splitmix64(s);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view label) {
    return mix_seed(seed, fnv1a64(label));
}

// Deterministic random stream. All draws go through explicit transforms so
// sequences are reproducible across platforms and standard library versions.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    RngStream derive(std::string_view label) const { return RngStream(mix_seed(seed_, label)); }
    RngStream derive(std::string_view label, std::uint64_t index) const {
        return RngStream(mix_seed(mix_seed(seed_, label), index));
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [lo, hi] via rejection-free Lemire-style reduction
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    // standard normal via Marsaglia polar method (spare discarded for a
    // position-independent stream)
    double normal() {
        while (true) {
            const double u = 2.0 * uniform() - 1.0;
            const double v = 2.0 * uniform() - 1.0;
            const double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

// Stateless standard-normal draw keyed by (seed, key); used for frozen
// random fields such as shadowing.
inline double hashed_normal(std::uint64_t seed, std::uint64_t key) {
    std::uint64_t s = mix_seed(seed, key);
    while (true) {
        const double u = 2.0 * (static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53) - 1.0;
        const double v = 2.0 * (static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53) - 1.0;
        const double q = u * u + v * v;
        if (q > 0.0 && q < 1.0) return u * std::sqrt(-2.0 * std::log(q) / q);
    }
}

}  // namespace edgesim
