#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "popcomp/estimation.hpp"
#include "popcomp/executor.hpp"
#include "popcomp/population.hpp"
#include "popcomp/sampling.hpp"

namespace popcomp {

// Explicit finite set of train/test splits standing in for the data
// distribution during exact brute-force evaluation. Sampling can draw
// from the same universe, so both computations target the identical
// finite population.
struct SplitUniverse {
    std::vector<Split> splits;

    static SplitUniverse from_seeds(std::size_t pool_size, const SplitPolicy& policy,
                                    std::span<const std::uint64_t> seeds);
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10000;

// Every (nuisance combination x split) pair as a SystemConfig, in
// deterministic lexicographic order (combination-major). Count equals
// nuisance_combination_count(spec) * |universe|; throws BudgetError when
// that exceeds the budget.
std::vector<SystemConfig> enumerate_systems(const PopulationSpec& spec,
                                            const SplitUniverse& universe,
                                            std::uint64_t budget = kDefaultEnumerationBudget);

// Exact expected generalization error of one arm over the finite
// universe: the equally weighted mean over all enumerated systems of the
// per-system mean loss. Broad arms average over every component
// combination of that arm (each combination equally likely), which
// multiplies into the budget.
double exact_ege(const PopulationSpec& spec, Arm arm, const ExecutorRegistry& registry,
                 const SplitUniverse& universe, const MetricSpec& metric, const DataPool& pool,
                 std::uint64_t budget = kDefaultEnumerationBudget);

// exact_ege(treatment) - exact_ege(control).
double exact_ate(const PopulationSpec& spec, const ExecutorRegistry& registry,
                 const SplitUniverse& universe, const MetricSpec& metric, const DataPool& pool,
                 std::uint64_t budget = kDefaultEnumerationBudget);

// Full enumeration of both arms with all per-run records, used by the
// harness for design = exhaustive. per-system means aggregate a broad
// arm's combinations; records hold one entry per executed run.
struct ExhaustiveResult {
    std::vector<SystemConfig> systems;
    std::vector<double> treatment_means; // aligned with systems
    std::vector<double> control_means;
    std::vector<double> ites;
    double ege_treatment = 0.0;
    double ege_control = 0.0;
    double ate = 0.0;
    std::vector<RunRecord> records;
};

ExhaustiveResult run_exhaustive(const PopulationSpec& spec, const ExecutorRegistry& registry,
                                const SplitUniverse& universe, const MetricSpec& metric,
                                const DataPool& pool,
                                std::uint64_t budget = kDefaultEnumerationBudget,
                                int parallelism = 1);

} // namespace popcomp
