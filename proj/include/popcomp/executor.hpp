#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "popcomp/data.hpp"
#include "popcomp/sampling.hpp"
#include "popcomp/surface.hpp"

namespace popcomp {

// How per-instance losses are computed from predictions, and how their
// sign should be read.
struct MetricSpec {
    enum class Orientation { lower_is_better, higher_is_better };

    std::string metric_id = "zero_one_error"; // zero_one_error | zero_one_agreement | surface_loss
    Orientation orientation = Orientation::lower_is_better;
};

// Materialized output of executing one armed system: the per-test-instance
// losses and their mean, plus enough metadata to reproduce the run.
// wall_time_s is diagnostic only and never serialized into reports.
struct RunRecord {
    int system_id = 0;
    Arm arm = Arm::treatment;
    ValueAssignment full_values;

    std::uint64_t split_seed = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;

    std::vector<double> per_instance_losses;
    double mean_loss = 0.0;

    std::string executor_id;
    double wall_time_s = 0.0;

    // True when training was degenerate and the defined fallback
    // (majority-class predictor) produced the predictions.
    bool degenerate_fallback = false;
};

struct ExecutionResult {
    std::vector<double> per_instance_losses;
    bool degenerate_fallback = false;
};

// An executor turns an armed system plus data into per-instance losses.
// Executors must be deterministic functions of their arguments and hold
// no shared mutable state; calls may run fully in parallel.
using ExecutorFn =
    std::function<ExecutionResult(const ArmedSystem&, const DataPool&, const MetricSpec&)>;

class ExecutorRegistry {
public:
    void add(std::string id, ExecutorFn executor);
    bool contains(const std::string& id) const;
    const ExecutorFn& get(const std::string& id) const; // throws ExecutorError when unknown
    std::vector<std::string> ids() const;

private:
    std::map<std::string, ExecutorFn> executors_;
};

// Registry with the built-in executors:
//   "text_pipeline"     - from-scratch text classification (zero-one metrics)
//   "synthetic_surface" - response surface with known ground truth
ExecutorRegistry builtin_registry(const SyntheticSurfaceParams& surface = {});

// Trains on the split's train indices only, predicts on the test indices
// only, and records per-instance losses under the metric. Deterministic
// given its arguments. Degenerate training (single-class training split)
// yields a flagged record via the majority-class fallback, not a failure.
RunRecord execute_system(const ArmedSystem& armed, const DataPool& pool,
                         const ExecutorRegistry& registry, const std::string& executor_id,
                         const MetricSpec& metric);

// Zero-one loss of one prediction under the metric.
double zero_one_loss(const MetricSpec& metric, const std::string& truth,
                     const std::string& predicted);

} // namespace popcomp
