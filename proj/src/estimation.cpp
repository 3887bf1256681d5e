#include "popcomp/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "popcomp/errors.hpp"
#include "popcomp/numeric.hpp"
#include "popcomp/rng.hpp"

namespace popcomp {

EGEEstimate ege_hat(std::span<const RunRecord> records, const std::string& method_label) {
    if (records.empty()) throw ContractError("ege_hat: no records");

    std::vector<const RunRecord*> sorted;
    sorted.reserve(records.size());
    for (const auto& record : records) {
        if (record.arm != records.front().arm) {
            throw ContractError("ege_hat: records mix treatment and control arms");
        }
        sorted.push_back(&record);
    }
    std::sort(sorted.begin(), sorted.end(),
              [](const RunRecord* a, const RunRecord* b) { return a->system_id < b->system_id; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i]->system_id == sorted[i - 1]->system_id) {
            throw ContractError("ege_hat: duplicate system_id " +
                                std::to_string(sorted[i]->system_id));
        }
    }

    std::vector<double> means;
    means.reserve(sorted.size());
    for (const RunRecord* record : sorted) means.push_back(record->mean_loss);
    return ege_from_means(std::move(means), method_label);
}

EGEEstimate ege_from_means(std::vector<double> per_system_means, const std::string& method_label) {
    if (per_system_means.empty()) throw ContractError("ege_from_means: no systems");
    EGEEstimate estimate;
    estimate.method_label = method_label;
    estimate.per_system_means = std::move(per_system_means);
    estimate.systems = estimate.per_system_means.size();
    estimate.value = mean(estimate.per_system_means);
    estimate.standard_error = standard_error_of_mean(estimate.per_system_means);
    return estimate;
}

double ite_hat(const RunRecord& treatment, const RunRecord& control) {
    if (treatment.system_id != control.system_id) {
        throw ContractError("ite_hat: records belong to different systems");
    }
    if (treatment.arm != Arm::treatment || control.arm != Arm::control) {
        throw ContractError("ite_hat: records are not a (treatment, control) pair");
    }
    if (treatment.split_seed != control.split_seed || treatment.n_train != control.n_train ||
        treatment.n_test != control.n_test) {
        throw ContractError("ite_hat: paired records disagree on the split");
    }
    return treatment.mean_loss - control.mean_loss;
}

double ate_hat(const EGEEstimate& ege_treatment, const EGEEstimate& ege_control) {
    return ege_treatment.value - ege_control.value;
}

std::string_view interval_method_name(IntervalMethod method) {
    return method == IntervalMethod::normal ? "normal" : "bootstrap_over_systems";
}

namespace {

// Type-7 quantile (linear interpolation between order statistics).
double quantile_sorted(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted.front();
    const double h = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

Interval percentile_interval(std::vector<double> stats, double level, IntervalMethod method) {
    std::sort(stats.begin(), stats.end());
    const double tail = (1.0 - level) / 2.0;
    return {quantile_sorted(stats, tail), quantile_sorted(stats, 1.0 - tail), level, method};
}

void check_level(double level) {
    if (!(level > 0.0 && level < 1.0)) throw ContractError("interval level must lie in (0,1)");
}

} // namespace

Interval ate_interval_paired(std::span<const double> ites, double level, IntervalMethod method,
                             std::uint64_t resamples, std::uint64_t seed) {
    check_level(level);
    if (ites.size() < 2) throw SizingError("ate_interval: need at least 2 systems");

    if (method == IntervalMethod::normal) {
        const double center = mean(ites);
        const double half = normal_quantile(1.0 - (1.0 - level) / 2.0) * standard_error_of_mean(ites);
        return {center - half, center + half, level, method};
    }

    if (resamples < 1) throw ContractError("ate_interval: resamples must be >= 1");
    std::vector<double> stats(resamples);
    std::vector<double> draw(ites.size());
    for (std::uint64_t k = 0; k < resamples; ++k) {
        Rng rng(derive_seed(seed, {std::string("boot"), k}));
        for (std::size_t i = 0; i < ites.size(); ++i) {
            draw[i] = ites[static_cast<std::size_t>(rng.next_below(ites.size()))];
        }
        stats[k] = mean(draw);
    }
    return percentile_interval(std::move(stats), level, method);
}

Interval ate_interval_independent(std::span<const double> means_treatment,
                                  std::span<const double> means_control, double level,
                                  IntervalMethod method, std::uint64_t resamples,
                                  std::uint64_t seed) {
    check_level(level);
    if (means_treatment.size() < 2 || means_control.size() < 2) {
        throw SizingError("ate_interval: need at least 2 systems per group");
    }

    if (method == IntervalMethod::normal) {
        const double center = mean(means_treatment) - mean(means_control);
        const double se_t = standard_error_of_mean(means_treatment);
        const double se_c = standard_error_of_mean(means_control);
        const double half =
            normal_quantile(1.0 - (1.0 - level) / 2.0) * std::sqrt(se_t * se_t + se_c * se_c);
        return {center - half, center + half, level, method};
    }

    if (resamples < 1) throw ContractError("ate_interval: resamples must be >= 1");
    std::vector<double> stats(resamples);
    std::vector<double> draw_t(means_treatment.size());
    std::vector<double> draw_c(means_control.size());
    for (std::uint64_t k = 0; k < resamples; ++k) {
        Rng rng(derive_seed(seed, {std::string("boot"), k}));
        for (auto& v : draw_t) {
            v = means_treatment[static_cast<std::size_t>(rng.next_below(means_treatment.size()))];
        }
        for (auto& v : draw_c) {
            v = means_control[static_cast<std::size_t>(rng.next_below(means_control.size()))];
        }
        stats[k] = mean(draw_t) - mean(draw_c);
    }
    return percentile_interval(std::move(stats), level, method);
}

} // namespace popcomp
