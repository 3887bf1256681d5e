#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "popcomp/population.hpp"
#include "popcomp/splits.hpp"

namespace popcomp {

enum class Arm { treatment, control };

std::string_view arm_name(Arm arm);

enum class Design { paired, independent, exhaustive };

std::string_view design_name(Design design);

// One sampled processing system before arm assignment: its nuisance
// method values, its data split, and its derived seed. Immutable after
// sampling.
struct SystemConfig {
    int system_id = 0; // 1-based ordinal
    ValueAssignment nuisance_values;
    Split split;
    std::uint64_t system_seed = 0;
};

// A system placed under one arm of the contrast. full_values extends the
// nuisance values with the arm's method value(s); for broad contrasts the
// arm contributes a sampled component combination.
struct ArmedSystem {
    SystemConfig base;
    Arm arm = Arm::treatment;
    ValueAssignment full_values;
};

// Draws `count` processing systems i.i.d. from the population: nuisance
// values independently per variable from that variable's weights, the
// split via draw_split under seed derive_seed(master, ["sys", i, "split"]).
// Sampling is with replacement, so configurations may repeat. Seeds are
// hierarchical, so growing the sample never perturbs earlier systems.
//
// When split_pool is non-empty, each system's split is instead drawn
// uniformly from it; used when estimates must target the same finite
// split universe as an exact enumeration.
std::vector<SystemConfig> sample_systems(const PopulationSpec& spec, int count,
                                         std::uint64_t master_seed,
                                         std::span<const Split> split_pool = {});

// Places sampled systems under arms.
//   paired      -> 2*S armed systems; each config appears once per arm with
//                  a bit-identical base, so pairs differ only in the contrast.
//   independent -> S armed systems; arm chosen by a fair coin per system.
// Broad contrasts additionally sample one component combination per armed
// system, uniformly over the arm's expansion and independently per arm.
std::vector<ArmedSystem> assign_arms(const std::vector<SystemConfig>& configs, Design design,
                                     const TreatmentContrast& contrast, std::uint64_t seed);

// The armed version of one system under one arm with the given contrast
// values; shared by sampling and exhaustive enumeration.
ArmedSystem make_armed(const SystemConfig& base, Arm arm, const TreatmentContrast& contrast,
                       const ValueAssignment& broad_combination = {});

} // namespace popcomp
