#pragma once

#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>

namespace spinforge {

// Stream for one sample: depends only on (seed, index), so results do not
// change with thread count or with how many samples are drawn.
inline std::mt19937_64 sample_stream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x5eedu};
    return std::mt19937_64(seq);
}

// Uniform in [0, 1) with 53 random bits; portable across standard libraries.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); }

// SPINFORGE_THREADS caps worker count; unset means hardware concurrency.
inline unsigned thread_budget() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SPINFORGE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<unsigned>(v);
    }
    return hw;
}

}  // namespace spinforge
