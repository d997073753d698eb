#pragma once
// Deterministic random streams. Every consumer derives its own stream from a
// master seed plus integer labels, so results never depend on thread count or
// on the order in which independent units of work run.

#include <cstdint>
#include <cmath>
#include <random>

namespace clusterfb {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Collapse (seed, a, b) into one well-mixed 64-bit stream id.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = seed;
    std::uint64_t h = splitmix64(s);
    s ^= a + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    h ^= splitmix64(s);
    s ^= b + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    return splitmix64(s);
}

// Thin wrapper so all sampling goes through explicit inverse transforms;
// avoids reliance on implementation-defined stdlib distributions.
class Rng {
public:
    explicit Rng(std::uint64_t stream_id) : gen_(stream_id) {}

    std::uint64_t bits() { return gen_(); }

    // uniform on [0, 1), 53-bit resolution
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1), both ends excluded
    double uniform01_open() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

    // standard normal via Box-Muller (two uniforms per pair, cached)
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01_open();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace clusterfb
