#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lachesis {

// Deterministic random source. Only the raw mt19937_64 stream is used (the
// engine output is pinned by the standard); all value transforms are done
// explicitly so results are identical across platforms and library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 bits of mantissa.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform index in [0, n). Modulo bias is < 2^-53 for the table sizes used here.
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

    double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

private:
    std::mt19937_64 gen_;
};

// Derives an independent child seed from (seed, stream) via splitmix64.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace lachesis
