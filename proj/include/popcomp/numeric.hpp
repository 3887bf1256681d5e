#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

namespace popcomp {

// Neumaier-compensated sum in the given iteration order. Aggregation
// throughout the project runs over a fixed, sorted order so that results
// do not depend on execution order or parallelism.
double compensated_sum(std::span<const double> xs);

double mean(std::span<const double> xs);

// Sample standard deviation (n-1 denominator); 0 when fewer than 2 values.
double sample_sd(std::span<const double> xs);

// sd / sqrt(n); 0 when fewer than 2 values.
double standard_error_of_mean(std::span<const double> xs);

// Pearson correlation; 0 if either side is constant.
double correlation(std::span<const double> xs, std::span<const double> ys);

// Inverse standard normal CDF (Acklam's rational approximation,
// |relative error| < 1.2e-9). p must be in (0, 1).
double normal_quantile(double p);

// FNV-1a 64-bit over raw bytes; used for content digests.
std::uint64_t fnv1a64(std::string_view bytes);

std::string to_hex(std::uint64_t v);

// Runs fn(0..n-1) on up to `threads` worker threads. Work items are
// independent; callers write results into preallocated slots so the
// outcome is schedule-independent. threads <= 1 runs inline.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

} // namespace popcomp
