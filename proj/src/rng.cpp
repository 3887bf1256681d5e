#include "popcomp/rng.hpp"

#include <cmath>
#include <numbers>

namespace popcomp {

namespace {

// SplitMix64 finalizer; also used as the avalanche step in seed derivation.
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t absorb(std::uint64_t state, std::uint64_t tag, std::uint64_t value) {
    state = mix64(state ^ (tag + 0x9e3779b97f4a7c15ULL));
    state = mix64(state ^ value);
    return state;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, const SeedPath& path) {
    // Domain-separation constant keeps the empty path distinct from master.
    std::uint64_t state = mix64(master ^ 0xa0761d6478bd642fULL);
    for (const auto& element : path) {
        if (std::holds_alternative<std::string>(element)) {
            state = absorb(state, 1, fnv1a(std::get<std::string>(element)));
        } else {
            state = absorb(state, 2, std::get<std::uint64_t>(element));
        }
    }
    return mix64(state);
}

std::uint64_t Rng::next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
}

std::uint64_t Rng::next_below(std::uint64_t n) {
    if (n <= 1) return 0;
    // Smallest all-ones mask covering n-1, then rejection sample.
    std::uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    std::uint64_t r;
    do {
        r = next_u64() & mask;
    } while (r >= n);
    return r;
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_gaussian() {
    // u1 in (0, 1] so the log argument is never zero.
    const double u1 = 1.0 - next_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace popcomp
