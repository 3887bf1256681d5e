#include "popcomp/oracle.hpp"

#include <string>

#include "popcomp/errors.hpp"
#include "popcomp/numeric.hpp"
#include "popcomp/rng.hpp"

namespace popcomp {

SplitUniverse SplitUniverse::from_seeds(std::size_t pool_size, const SplitPolicy& policy,
                                        std::span<const std::uint64_t> seeds) {
    if (seeds.empty()) throw ContractError("split universe: need at least one seed");
    SplitUniverse universe;
    universe.splits.reserve(seeds.size());
    for (const std::uint64_t seed : seeds) {
        universe.splits.push_back(draw_split(pool_size, policy, seed));
    }
    return universe;
}

std::vector<SystemConfig> enumerate_systems(const PopulationSpec& spec,
                                            const SplitUniverse& universe, std::uint64_t budget) {
    if (universe.splits.empty()) throw ContractError("enumerate_systems: empty split universe");
    const std::uint64_t combos = nuisance_combination_count(spec); // validates the spec
    const auto n_splits = static_cast<std::uint64_t>(universe.splits.size());
    if (combos > budget / n_splits || combos * n_splits > budget) {
        throw BudgetError("enumerate_systems: " + std::to_string(combos) + " combinations x " +
                          std::to_string(n_splits) + " splits exceeds budget " +
                          std::to_string(budget));
    }

    const std::vector<ValueAssignment> assignments = expand_variables(spec.nuisance);
    std::vector<SystemConfig> systems;
    systems.reserve(assignments.size() * universe.splits.size());
    int next_id = 1;
    for (std::size_t c = 0; c < assignments.size(); ++c) {
        for (std::size_t s = 0; s < universe.splits.size(); ++s) {
            SystemConfig config;
            config.system_id = next_id++;
            config.nuisance_values = assignments[c];
            config.split = universe.splits[s];
            config.system_seed =
                derive_seed(0x65786163745f656eULL, {std::string("enum"), static_cast<std::uint64_t>(c),
                                                    static_cast<std::uint64_t>(s)});
            systems.push_back(std::move(config));
        }
    }
    return systems;
}

namespace {

// Component combinations contributed by one arm: the singleton for a
// simple contrast, the full expansion for a broad one.
std::vector<ValueAssignment> arm_combinations(const PopulationSpec& spec, Arm arm) {
    if (spec.contrast.kind == ContrastKind::simple) return {ValueAssignment{}};
    const BroadMethodSpec& broad =
        arm == Arm::treatment ? spec.contrast.broad_treatment : spec.contrast.broad_control;
    return expand_broad_method(broad);
}

// Per-system mean loss under one arm, averaging over the arm's component
// combinations. Optionally collects every executed run.
std::vector<double> per_system_arm_means(const std::vector<SystemConfig>& systems,
                                         const PopulationSpec& spec, Arm arm,
                                         const ExecutorRegistry& registry, const MetricSpec& metric,
                                         const DataPool& pool, std::uint64_t budget,
                                         int parallelism, std::vector<RunRecord>* records_out) {
    const std::vector<ValueAssignment> combos = arm_combinations(spec, arm);
    const auto n_runs = static_cast<std::uint64_t>(systems.size()) *
                        static_cast<std::uint64_t>(combos.size());
    if (n_runs > budget) {
        throw BudgetError("exact enumeration: " + std::to_string(n_runs) +
                          " runs exceed budget " + std::to_string(budget));
    }

    std::vector<RunRecord> records(n_runs);
    parallel_for(static_cast<std::size_t>(n_runs), parallelism, [&](std::size_t r) {
        const std::size_t sys = r / combos.size();
        const std::size_t combo = r % combos.size();
        const ArmedSystem armed = make_armed(systems[sys], arm, spec.contrast, combos[combo]);
        records[r] = execute_system(armed, pool, registry, spec.executor_id, metric);
    });

    std::vector<double> means(systems.size());
    std::vector<double> slice(combos.size());
    for (std::size_t sys = 0; sys < systems.size(); ++sys) {
        for (std::size_t combo = 0; combo < combos.size(); ++combo) {
            slice[combo] = records[sys * combos.size() + combo].mean_loss;
        }
        means[sys] = mean(slice);
    }

    if (records_out != nullptr) *records_out = std::move(records);
    return means;
}

} // namespace

double exact_ege(const PopulationSpec& spec, Arm arm, const ExecutorRegistry& registry,
                 const SplitUniverse& universe, const MetricSpec& metric, const DataPool& pool,
                 std::uint64_t budget) {
    const std::vector<SystemConfig> systems = enumerate_systems(spec, universe, budget);
    const std::vector<double> means =
        per_system_arm_means(systems, spec, arm, registry, metric, pool, budget, 1, nullptr);
    return mean(means);
}

double exact_ate(const PopulationSpec& spec, const ExecutorRegistry& registry,
                 const SplitUniverse& universe, const MetricSpec& metric, const DataPool& pool,
                 std::uint64_t budget) {
    return exact_ege(spec, Arm::treatment, registry, universe, metric, pool, budget) -
           exact_ege(spec, Arm::control, registry, universe, metric, pool, budget);
}

ExhaustiveResult run_exhaustive(const PopulationSpec& spec, const ExecutorRegistry& registry,
                                const SplitUniverse& universe, const MetricSpec& metric,
                                const DataPool& pool, std::uint64_t budget, int parallelism) {
    ExhaustiveResult result;
    result.systems = enumerate_systems(spec, universe, budget);

    std::vector<RunRecord> treatment_records, control_records;
    result.treatment_means =
        per_system_arm_means(result.systems, spec, Arm::treatment, registry, metric, pool, budget,
                             parallelism, &treatment_records);
    result.control_means =
        per_system_arm_means(result.systems, spec, Arm::control, registry, metric, pool, budget,
                             parallelism, &control_records);

    result.ites.resize(result.systems.size());
    for (std::size_t i = 0; i < result.systems.size(); ++i) {
        result.ites[i] = result.treatment_means[i] - result.control_means[i];
    }
    result.ege_treatment = mean(result.treatment_means);
    result.ege_control = mean(result.control_means);
    result.ate = result.ege_treatment - result.ege_control;

    // Interleave records per system, treatment runs first, for the runs
    // table: deterministic system-major order.
    const std::size_t t_per_sys = treatment_records.size() / result.systems.size();
    const std::size_t c_per_sys = control_records.size() / result.systems.size();
    result.records.reserve(treatment_records.size() + control_records.size());
    for (std::size_t sys = 0; sys < result.systems.size(); ++sys) {
        for (std::size_t k = 0; k < t_per_sys; ++k) {
            result.records.push_back(std::move(treatment_records[sys * t_per_sys + k]));
        }
        for (std::size_t k = 0; k < c_per_sys; ++k) {
            result.records.push_back(std::move(control_records[sys * c_per_sys + k]));
        }
    }
    return result;
}

} // namespace popcomp
