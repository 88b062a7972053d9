#pragma once

#include <cstdint>
#include <random>

namespace evonf {

/*
 * Deterministic random utilities.
 *
 * All stochastic code in the library draws through Rng, which wraps
 * std::mt19937_64 (bit-stable across platforms by the C++ standard) and maps
 * raw 64-bit outputs to doubles/integers with fixed arithmetic instead of
 * std::uniform_*_distribution, whose output sequences are implementation
 * defined.  Substreams for (seed, generation, index) triples are derived with
 * a SplitMix64 mix so that work units can be seeded independently of
 * evaluation order.
 */

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/* Deterministic substream seed for a work unit. */
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t generation,
                                    std::uint64_t index) {
    std::uint64_t s = splitmix64(master ^ 0x6a09e667f3bcc908ULL);
    s = splitmix64(s ^ splitmix64(generation + 0x243f6a8885a308d3ULL));
    s = splitmix64(s ^ splitmix64(index + 0x13198a2e03707344ULL));
    return s;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    /* Uniform double in [0, 1) with 53 random bits. */
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /* Uniform double in [lo, hi). */
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /* Uniform integer in [0, n).  Fixed-point multiply keeps the mapping
     * platform independent (no rejection loop, bias < 2^-64). */
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(eng_()) * n) >> 64);
    }

    /* Uniform integer in [lo, hi] inclusive. */
    long uniform_int(long lo, long hi) {
        return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool coin() { return (eng_() >> 63) != 0; }

  private:
    std::mt19937_64 eng_;
};

} // namespace evonf
