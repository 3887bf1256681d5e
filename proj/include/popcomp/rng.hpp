#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace popcomp {

// One element of a seed-derivation path: a label ("sys", "split", ...)
// or an ordinal (system number, resample counter, ...).
using SeedPathElement = std::variant<std::string, std::uint64_t>;
using SeedPath = std::vector<SeedPathElement>;

// Deterministically maps (master seed, path) to a 64-bit seed.
// Distinct paths give distinct seeds with overwhelming probability,
// and the result is stable across runs, platforms and thread schedules.
// The empty path returns a fixed mixing of the master, never the master
// itself, so child streams never alias the parent.
std::uint64_t derive_seed(std::uint64_t master, const SeedPath& path);

// Portable pseudo-random generator (SplitMix64 core). All distributions
// are implemented here rather than via <random> so that every draw is
// bit-identical regardless of standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    // Uniform on [0, n). n must be >= 1. Unbiased via mask rejection.
    std::uint64_t next_below(std::uint64_t n);

    // Uniform on [0, 1) with 53 random bits.
    double next_double();

    // Standard normal via Box-Muller. Consumes two uniforms per call;
    // no cached state, so the draw sequence is a pure function of the
    // call count.
    double next_gaussian();

    // Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            const std::uint64_t j = next_below(i + 1);
            std::swap(v[i], v[static_cast<std::size_t>(j)]);
        }
    }

private:
    std::uint64_t state_;
};

} // namespace popcomp
