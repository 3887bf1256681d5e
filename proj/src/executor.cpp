#include "popcomp/executor.hpp"

#include <chrono>
#include <set>

#include "popcomp/errors.hpp"
#include "popcomp/numeric.hpp"
#include "popcomp/text_pipeline.hpp"

namespace popcomp {

void ExecutorRegistry::add(std::string id, ExecutorFn executor) {
    executors_[std::move(id)] = std::move(executor);
}

bool ExecutorRegistry::contains(const std::string& id) const {
    return executors_.count(id) != 0;
}

const ExecutorFn& ExecutorRegistry::get(const std::string& id) const {
    const auto it = executors_.find(id);
    if (it == executors_.end()) throw ExecutorError("unknown executor '" + id + "'");
    return it->second;
}

std::vector<std::string> ExecutorRegistry::ids() const {
    std::vector<std::string> out;
    out.reserve(executors_.size());
    for (const auto& [id, fn] : executors_) out.push_back(id);
    return out;
}

double zero_one_loss(const MetricSpec& metric, const std::string& truth,
                     const std::string& predicted) {
    const bool hit = truth == predicted;
    if (metric.metric_id == "zero_one_agreement") return hit ? 1.0 : 0.0;
    return hit ? 0.0 : 1.0;
}

namespace {

ExecutionResult text_pipeline_executor(const ArmedSystem& armed, const DataPool& pool,
                                       const MetricSpec& metric) {
    const Split& split = armed.base.split;

    std::vector<Instance> train;
    train.reserve(split.train_indices.size());
    for (const std::size_t i : split.train_indices) train.push_back(pool.instances.at(i));

    std::vector<std::string> test_texts, test_labels;
    test_texts.reserve(split.test_indices.size());
    for (const std::size_t i : split.test_indices) {
        test_texts.push_back(pool.instances.at(i).text);
        test_labels.push_back(pool.instances.at(i).label);
    }

    ExecutionResult result;
    std::vector<std::string> predictions;

    std::set<std::string> train_labels;
    for (const auto& doc : train) train_labels.insert(doc.label);
    if (train_labels.size() < 2) {
        // Degenerate training split: majority-class fallback so large
        // sampled experiments never abort mid-run.
        result.degenerate_fallback = true;
        predictions.assign(test_texts.size(), *train_labels.begin());
    } else {
        const TextPipelineConfig config = TextPipelineConfig::from_values(armed.full_values);
        predictions =
            run_text_pipeline(config, train, test_texts, pool.class_set, armed.base.system_seed);
    }

    result.per_instance_losses.reserve(test_labels.size());
    for (std::size_t i = 0; i < test_labels.size(); ++i) {
        result.per_instance_losses.push_back(zero_one_loss(metric, test_labels[i], predictions[i]));
    }
    return result;
}

} // namespace

ExecutorRegistry builtin_registry(const SyntheticSurfaceParams& surface) {
    ExecutorRegistry registry;
    registry.add("text_pipeline", text_pipeline_executor);
    registry.add("synthetic_surface",
                 [surface](const ArmedSystem& armed, const DataPool& pool,
                           const MetricSpec& metric) -> ExecutionResult {
                     (void)pool;
                     (void)metric;
                     return {run_synthetic(armed, surface), false};
                 });
    return registry;
}

RunRecord execute_system(const ArmedSystem& armed, const DataPool& pool,
                         const ExecutorRegistry& registry, const std::string& executor_id,
                         const MetricSpec& metric) {
    const ExecutorFn& executor = registry.get(executor_id);

    const auto start = std::chrono::steady_clock::now();
    ExecutionResult result = executor(armed, pool, metric);
    const auto stop = std::chrono::steady_clock::now();

    if (result.per_instance_losses.size() != armed.base.split.test_indices.size()) {
        throw ExecutorError("executor '" + executor_id + "' returned " +
                            std::to_string(result.per_instance_losses.size()) + " losses for " +
                            std::to_string(armed.base.split.test_indices.size()) +
                            " test instances");
    }

    RunRecord record;
    record.system_id = armed.base.system_id;
    record.arm = armed.arm;
    record.full_values = armed.full_values;
    record.split_seed = armed.base.split.seed;
    record.n_train = armed.base.split.train_indices.size();
    record.n_test = armed.base.split.test_indices.size();
    record.per_instance_losses = std::move(result.per_instance_losses);
    record.mean_loss = mean(record.per_instance_losses);
    record.executor_id = executor_id;
    record.wall_time_s = std::chrono::duration<double>(stop - start).count();
    record.degenerate_fallback = result.degenerate_fallback;
    return record;
}

} // namespace popcomp
