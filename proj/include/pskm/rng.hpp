#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pskm {

// splitmix64 mixing step; a cheap, well-distributed 64-bit hash used to
// derive independent substream seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of substream `index` within stream `stream` under `seed`. Streams
// keep replicate-level and restart-level randomness independent, so e.g.
// adding replicates never shifts the seeds of earlier ones.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(seed ^ splitmix64(stream)) ^ index);
}

// mt19937_64 with explicitly coded samplers. The standard leaves
// distribution algorithms unspecified, so uniform/normal/integer draws
// are implemented here to keep equal seeds bit-reproducible across
// toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform on {0, ..., n-1}; rejection on the top partial block keeps
    // the draw unbiased.
    std::uint64_t uniform_int(std::uint64_t n) {
        std::uint64_t x, r;
        do {
            x = engine_();
            r = x % n;
        } while (x - r > UINT64_MAX - (n - 1));
        return r;
    }

    // Standard normal via Box-Muller; the companion value is cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * kPi * u2;
        cached_ = radius * std::sin(angle);
        have_cached_ = true;
        return radius * std::cos(angle);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

  private:
    static constexpr double kPi = 3.14159265358979323846;
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace pskm
