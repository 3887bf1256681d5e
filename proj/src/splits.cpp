#include "popcomp/splits.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "popcomp/errors.hpp"
#include "popcomp/rng.hpp"

namespace popcomp {

SplitSizes resolve_split_sizes(std::size_t pool_size, const SplitPolicy& policy) {
    if (pool_size < 2) {
        throw SizingError("split: pool must hold at least 2 instances, got " +
                          std::to_string(pool_size));
    }

    SplitSizes sizes;
    if (policy.train_size && policy.test_size) {
        sizes.n_train = *policy.train_size;
        sizes.n_test = *policy.test_size;
    } else if (policy.train_size) {
        sizes.n_train = *policy.train_size;
        sizes.n_test = pool_size > sizes.n_train ? pool_size - sizes.n_train : 0;
    } else if (policy.test_size) {
        sizes.n_test = *policy.test_size;
        sizes.n_train = pool_size > sizes.n_test ? pool_size - sizes.n_test : 0;
    } else {
        if (!(policy.train_fraction > 0.0 && policy.train_fraction < 1.0)) {
            throw SizingError("split: train_fraction must lie in (0,1)");
        }
        sizes.n_train = static_cast<std::size_t>(
            std::llround(policy.train_fraction * static_cast<double>(pool_size)));
        if (sizes.n_train < 1) sizes.n_train = 1;
        if (sizes.n_train > pool_size - 1) sizes.n_train = pool_size - 1;
        sizes.n_test = pool_size - sizes.n_train;
    }

    if (sizes.n_train < 1 || sizes.n_test < 1) {
        throw SizingError("split: policy yields N=" + std::to_string(sizes.n_train) +
                          ", M=" + std::to_string(sizes.n_test) + "; both must be >= 1");
    }
    if (sizes.n_train + sizes.n_test > pool_size) {
        throw SizingError("split: N+M=" + std::to_string(sizes.n_train + sizes.n_test) +
                          " exceeds pool size " + std::to_string(pool_size));
    }
    return sizes;
}

Split draw_split(std::size_t pool_size, const SplitPolicy& policy, std::uint64_t seed) {
    const SplitSizes sizes = resolve_split_sizes(pool_size, policy);

    std::vector<std::size_t> order(pool_size);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);

    Split split;
    split.seed = seed;
    split.train_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(sizes.n_train));
    split.test_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(sizes.n_train),
                              order.begin() + static_cast<std::ptrdiff_t>(sizes.n_train + sizes.n_test));
    return split;
}

} // namespace popcomp
