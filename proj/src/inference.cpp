#include "popcomp/inference.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "popcomp/errors.hpp"
#include "popcomp/numeric.hpp"
#include "popcomp/rng.hpp"

namespace popcomp {

std::string_view sidedness_name(Sidedness sidedness) {
    return sidedness == Sidedness::one_sided_greater ? "one_sided_greater" : "two_sided";
}

namespace {

bool exceeds(double candidate, double observed, Sidedness sidedness) {
    // Ties count toward the rejection region (literal >=).
    if (sidedness == Sidedness::one_sided_greater) return candidate >= observed;
    return std::abs(candidate) >= std::abs(observed);
}

TestResult finish(std::string test_id, double statistic, std::uint64_t hits, std::uint64_t total,
                  const ResamplingOptions& options, Sidedness sidedness) {
    TestResult result;
    result.test_id = std::move(test_id);
    result.statistic = statistic;
    result.p_value = static_cast<double>(hits) / static_cast<double>(total);
    result.resamples = total;
    result.alpha = options.alpha;
    result.reject = result.p_value < options.alpha;
    result.seed = options.seed;
    result.sidedness = sidedness;
    return result;
}

// M^M if it fits the budget, 0 otherwise.
std::uint64_t tuple_count_within(std::uint64_t m, std::uint64_t budget) {
    std::uint64_t total = 1;
    for (std::uint64_t i = 0; i < m; ++i) {
        if (total > budget / m) return 0;
        total *= m;
    }
    return total <= budget ? total : 0;
}

// C(n, k) if it fits the budget, 0 otherwise.
std::uint64_t choose_within(std::uint64_t n, std::uint64_t k, std::uint64_t budget) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        const double projected = static_cast<double>(result) * static_cast<double>(n - k + i) /
                                 static_cast<double>(i);
        if (projected > static_cast<double>(budget) * 2.0) return 0;
        result = result * (n - k + i) / i;
        if (result > budget) return 0;
    }
    return result;
}

// Centers stats at zero and counts shifted values that reach the observed
// statistic.
std::uint64_t count_shifted_hits(const std::vector<double>& stats, double observed,
                                 Sidedness sidedness) {
    const double center = mean(stats);
    std::uint64_t hits = 0;
    for (const double s : stats) {
        if (exceeds(s - center, observed, sidedness)) ++hits;
    }
    return hits;
}

} // namespace

TestResult shifted_bootstrap_test(std::span<const double> losses_a,
                                  std::span<const double> losses_b,
                                  const ResamplingOptions& options, Sidedness sidedness) {
    if (losses_a.size() != losses_b.size()) {
        throw ContractError("shifted_bootstrap_test: loss vectors differ in length");
    }
    const std::size_t m = losses_a.size();
    if (m < 1) throw SizingError("shifted_bootstrap_test: need at least 1 test instance");
    if (options.resamples < 1) throw ContractError("shifted_bootstrap_test: resamples must be >= 1");

    std::vector<double> diffs(m);
    for (std::size_t i = 0; i < m; ++i) diffs[i] = losses_a[i] - losses_b[i];
    const double observed = mean(diffs);

    std::vector<double> stats;
    const std::uint64_t exhaustive = tuple_count_within(m, options.exhaustive_budget);
    if (exhaustive != 0) {
        // All index tuples of length M, odometer order; every tuple is an
        // equally likely bootstrap resample.
        stats.reserve(exhaustive);
        std::vector<std::size_t> idx(m, 0);
        std::vector<double> draw(m);
        for (std::uint64_t k = 0; k < exhaustive; ++k) {
            for (std::size_t i = 0; i < m; ++i) draw[i] = diffs[idx[i]];
            stats.push_back(mean(draw));
            for (std::size_t i = m; i-- > 0;) {
                if (++idx[i] < m) break;
                idx[i] = 0;
            }
        }
    } else {
        stats.reserve(options.resamples);
        std::vector<double> draw(m);
        for (std::uint64_t k = 0; k < options.resamples; ++k) {
            Rng rng(derive_seed(options.seed, {std::string("resample"), k}));
            for (std::size_t i = 0; i < m; ++i) {
                draw[i] = diffs[static_cast<std::size_t>(rng.next_below(m))];
            }
            stats.push_back(mean(draw));
        }
    }

    const std::uint64_t hits = count_shifted_hits(stats, observed, sidedness);
    return finish("shifted_bootstrap", observed, hits, stats.size(), options, sidedness);
}

TestResult paired_system_test(std::span<const double> ites, PairedTestMode mode,
                              const ResamplingOptions& options, Sidedness sidedness) {
    const std::size_t s = ites.size();
    if (s < 2) throw SizingError("paired_system_test: need at least 2 systems");
    if (options.resamples < 1) throw ContractError("paired_system_test: resamples must be >= 1");

    const double observed = mean(ites);

    if (mode == PairedTestMode::bootstrap) {
        std::vector<double> stats(options.resamples);
        std::vector<double> draw(s);
        for (std::uint64_t k = 0; k < options.resamples; ++k) {
            Rng rng(derive_seed(options.seed, {std::string("resample"), k}));
            for (std::size_t i = 0; i < s; ++i) {
                draw[i] = ites[static_cast<std::size_t>(rng.next_below(s))];
            }
            stats[k] = mean(draw);
        }
        const std::uint64_t hits = count_shifted_hits(stats, observed, sidedness);
        return finish("paired_system_bootstrap", observed, hits, stats.size(), options, sidedness);
    }

    // Each flipped statistic goes through the same mean() as the observed
    // one, so the identity pattern ties the observed value exactly.
    std::uint64_t hits = 0;
    std::uint64_t total = 0;
    std::vector<double> flipped(s);
    if (s <= 20) {
        // Exhaustive over all 2^S sign vectors: exact small-sample p.
        total = std::uint64_t{1} << s;
        for (std::uint64_t pattern = 0; pattern < total; ++pattern) {
            for (std::size_t i = 0; i < s; ++i) {
                flipped[i] = (pattern >> i) & 1 ? -ites[i] : ites[i];
            }
            if (exceeds(mean(flipped), observed, sidedness)) ++hits;
        }
    } else {
        total = options.resamples;
        for (std::uint64_t k = 0; k < total; ++k) {
            Rng rng(derive_seed(options.seed, {std::string("resample"), k}));
            std::uint64_t bits = 0;
            for (std::size_t i = 0; i < s; ++i) {
                if (i % 64 == 0) bits = rng.next_u64();
                flipped[i] = (bits >> (i % 64)) & 1 ? -ites[i] : ites[i];
            }
            if (exceeds(mean(flipped), observed, sidedness)) ++hits;
        }
    }
    return finish("paired_system_sign_flip", observed, hits, total, options, sidedness);
}

TestResult independent_system_test(std::span<const double> means_treatment,
                                   std::span<const double> means_control,
                                   const ResamplingOptions& options, Sidedness sidedness) {
    const std::size_t n_t = means_treatment.size();
    const std::size_t n_c = means_control.size();
    if (n_t < 1 || n_c < 1) throw SizingError("independent_system_test: both groups must be non-empty");
    if (n_t + n_c < 3) throw SizingError("independent_system_test: need at least 3 systems overall");
    if (options.resamples < 1) throw ContractError("independent_system_test: resamples must be >= 1");

    const double observed = mean(means_treatment) - mean(means_control);

    std::vector<double> pooled;
    pooled.reserve(n_t + n_c);
    pooled.insert(pooled.end(), means_treatment.begin(), means_treatment.end());
    pooled.insert(pooled.end(), means_control.begin(), means_control.end());
    const std::size_t n = pooled.size();

    std::uint64_t hits = 0;
    std::uint64_t total = 0;

    // Each relabeled statistic is computed exactly like the observed one
    // (two group means), so the identity relabeling ties it exactly.
    std::vector<double> group_t(n_t), group_c(n_c);
    const auto relabeled_stat = [&](const auto& in_treatment) {
        std::size_t at_t = 0, at_c = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (in_treatment(i)) group_t[at_t++] = pooled[i];
            else group_c[at_c++] = pooled[i];
        }
        return mean(group_t) - mean(group_c);
    };

    const std::uint64_t exhaustive = choose_within(n, n_t, options.exhaustive_budget);
    if (exhaustive != 0) {
        // All relabelings preserving group sizes: choose which pooled
        // indices form the treatment group, lexicographically.
        total = exhaustive;
        std::vector<std::size_t> idx(n_t);
        for (std::size_t i = 0; i < n_t; ++i) idx[i] = i;
        for (;;) {
            std::size_t next = 0;
            const double stat = relabeled_stat([&](std::size_t i) {
                if (next < n_t && idx[next] == i) {
                    ++next;
                    return true;
                }
                return false;
            });
            if (exceeds(stat, observed, sidedness)) ++hits;

            // Advance to the next combination.
            std::size_t pos = n_t;
            while (pos > 0 && idx[pos - 1] == n - n_t + pos - 1) --pos;
            if (pos == 0) break;
            ++idx[pos - 1];
            for (std::size_t i = pos; i < n_t; ++i) idx[i] = idx[i - 1] + 1;
        }
    } else {
        total = options.resamples;
        std::vector<unsigned char> label(n);
        std::vector<std::size_t> order(n);
        for (std::uint64_t k = 0; k < total; ++k) {
            Rng rng(derive_seed(options.seed, {std::string("resample"), k}));
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            rng.shuffle(order);
            std::fill(label.begin(), label.end(), 0);
            for (std::size_t i = 0; i < n_t; ++i) label[order[i]] = 1;
            const double stat = relabeled_stat([&](std::size_t i) { return label[i] == 1; });
            if (exceeds(stat, observed, sidedness)) ++hits;
        }
    }
    return finish("independent_system_permutation", observed, hits, total, options, sidedness);
}

} // namespace popcomp
