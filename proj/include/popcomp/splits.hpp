#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace popcomp {

// How each processing system partitions the data pool into a training
// set of size N and a disjoint test set of size M. Either a fraction or
// absolute counts; counts win when present. v1 splits are always disjoint.
struct SplitPolicy {
    double train_fraction = 0.0;
    std::optional<std::size_t> train_size;
    std::optional<std::size_t> test_size;
    bool disjoint = true;
};

struct SplitSizes {
    std::size_t n_train = 0;
    std::size_t n_test = 0;
};

// One materialized train/test partition of a pool, plus the seed that
// produced it. Index sets are disjoint and within pool bounds.
struct Split {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::uint64_t seed = 0;
};

// Resolves the policy against a concrete pool size.
// Throws SizingError when N or M would fall below 1 or exceed the pool.
SplitSizes resolve_split_sizes(std::size_t pool_size, const SplitPolicy& policy);

// Uniformly random disjoint partition-sample: a seeded random permutation
// of 0..pool_size-1, first N indices to train, next M to test.
// Deterministic function of (pool_size, policy, seed).
Split draw_split(std::size_t pool_size, const SplitPolicy& policy, std::uint64_t seed);

} // namespace popcomp
