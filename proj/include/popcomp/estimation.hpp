#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "popcomp/executor.hpp"

namespace popcomp {

// Estimated expected generalization error of one method within the
// population: the unweighted mean over systems of each system's mean
// per-instance loss. Every system counts equally regardless of its
// test-set size; this is deliberately a mean of means, not a pooled
// mean over all test instances.
struct EGEEstimate {
    std::string method_label;
    double value = 0.0;
    std::size_t systems = 0;
    std::vector<double> per_system_means;
    double standard_error = 0.0; // sd(per_system_means) / sqrt(S); 0 when S < 2
};

// Aggregates the records of one arm. Records are summed in sorted
// system_id order with compensated summation, so the result is identical
// no matter how execution was scheduled. Mixed arms or duplicate system
// ids raise ContractError.
EGEEstimate ege_hat(std::span<const RunRecord> records, const std::string& method_label);

// Builds the estimate directly from per-system means already in a fixed
// order (used by exhaustive enumeration, where a system's arm-level mean
// may itself aggregate several runs).
EGEEstimate ege_from_means(std::vector<double> per_system_means, const std::string& method_label);

// Individual treatment effect estimate for one paired system:
// mean loss under treatment minus mean loss under control.
// The two records must share system_id, split and nuisance values.
double ite_hat(const RunRecord& treatment, const RunRecord& control);

// Average treatment effect estimate; antisymmetric in its arguments.
double ate_hat(const EGEEstimate& ege_treatment, const EGEEstimate& ege_control);

enum class IntervalMethod { normal, bootstrap_over_systems };

std::string_view interval_method_name(IntervalMethod method);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double level = 0.0;
    IntervalMethod method = IntervalMethod::normal;
};

// Uncertainty interval for a paired-design ATE from the per-system ITEs.
//   normal                 : mean +- z(level) * sd(ites)/sqrt(S)
//   bootstrap_over_systems : percentile interval over `resamples`
//                            resamples of systems (never of test points)
// Requires at least 2 systems.
Interval ate_interval_paired(std::span<const double> ites, double level, IntervalMethod method,
                             std::uint64_t resamples, std::uint64_t seed);

// Same for an independent design, from the two groups' per-system means;
// the normal method combines the groups' standard errors. Requires at
// least 2 systems per group.
Interval ate_interval_independent(std::span<const double> means_treatment,
                                  std::span<const double> means_control, double level,
                                  IntervalMethod method, std::uint64_t resamples,
                                  std::uint64_t seed);

} // namespace popcomp
