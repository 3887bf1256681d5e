#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace popcomp {

enum class Sidedness { one_sided_greater, two_sided };

std::string_view sidedness_name(Sidedness sidedness);

struct TestResult {
    std::string test_id;
    double statistic = 0.0;  // observed difference delta
    double p_value = 0.0;
    std::uint64_t resamples = 0; // resamples actually evaluated (exhaustive count when exact)
    double alpha = 0.0;
    bool reject = false; // p_value < alpha
    std::uint64_t seed = 0;
    Sidedness sidedness = Sidedness::two_sided;
};

struct ResamplingOptions {
    std::uint64_t resamples = 10000;
    double alpha = 0.05;
    std::uint64_t seed = 0;

    // Exhaustive enumeration replaces random resampling whenever the full
    // space fits this budget, making small-sample results exact.
    std::uint64_t exhaustive_budget = 100000;
};

// The single-test-set baseline: both methods' per-instance losses on one
// shared test set. Resamples the M test indices with replacement, centers
// the resampled difference distribution at zero, and counts shifted
// statistics >= the observed difference (ties included). One-sided by
// default; enumerates all M^M index tuples instead of sampling when that
// fits the exhaustive budget.
//
// This test only resamples the test set, so it captures a single trained
// system's idiosyncrasy, not the population effect; it is provided as the
// baseline that the system-level tests replace.
TestResult shifted_bootstrap_test(std::span<const double> losses_a,
                                  std::span<const double> losses_b,
                                  const ResamplingOptions& options,
                                  Sidedness sidedness = Sidedness::one_sided_greater);

enum class PairedTestMode { sign_flip, bootstrap };

// Population-level test for paired designs on the per-system ITEs.
//   sign_flip : randomization test over +-1 sign vectors, exhaustive for
//               S <= 20, otherwise `resamples` random vectors.
//   bootstrap : resample systems with replacement, shift, compare like the
//               baseline but at system level.
// Two-sided by default. Requires S >= 2.
TestResult paired_system_test(std::span<const double> ites, PairedTestMode mode,
                              const ResamplingOptions& options,
                              Sidedness sidedness = Sidedness::two_sided);

// Population-level permutation test for independent designs on the two
// groups' per-system means: relabels group membership preserving group
// sizes, exhaustively when the number of relabelings fits the budget.
// Requires both groups non-empty and at least 3 systems overall.
TestResult independent_system_test(std::span<const double> means_treatment,
                                   std::span<const double> means_control,
                                   const ResamplingOptions& options,
                                   Sidedness sidedness = Sidedness::two_sided);

} // namespace popcomp
