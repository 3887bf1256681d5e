#pragma once

#include <string>
#include <vector>

#include "popcomp/sampling.hpp"

namespace popcomp {

// Additive shift applied when the armed system carries (variable, value).
struct ValueEffect {
    std::string variable;
    std::string value;
    double effect = 0.0;
};

// Additive shift applied when the armed system carries both pairs. Keying
// one side on the contrast value and the other on a nuisance value makes
// the treatment effect differ across systems, which is how populations
// without unit homogeneity are modeled.
struct InteractionEffect {
    std::string variable_a;
    std::string value_a;
    std::string variable_b;
    std::string value_b;
    double effect = 0.0;
};

// Response surface with known ground truth. Per-instance loss:
//
//   loss_m = base + sum(value effects) + sum(interaction effects)
//          + treatment_effect * [arm == treatment]
//          + split_noise + instance_noise_m
//
// Both noise terms are zero-mean Gaussians seeded from the system's split
// seed and are therefore identical for the two arms of a pair: paired
// differences reduce to the configured effect terms exactly.
struct SyntheticSurfaceParams {
    double base_loss = 0.0;
    std::vector<ValueEffect> value_effects;
    std::vector<InteractionEffect> interaction_effects;
    double treatment_effect = 0.0;
    double split_noise_sd = 0.0;
    double instance_noise_sd = 0.0;

    // Off by default so the configured treatment effect stays exact.
    bool clip_to_unit = false;
};

// One loss per test index of the armed system's split.
std::vector<double> run_synthetic(const ArmedSystem& armed, const SyntheticSurfaceParams& params);

// The deterministic part of the loss for a full value assignment under
// one arm (no noise); used by tests and ground-truth computations.
double surface_expected_loss(const SyntheticSurfaceParams& params, const ValueAssignment& values,
                             Arm arm);

} // namespace popcomp
