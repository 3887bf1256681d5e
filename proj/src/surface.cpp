#include "popcomp/surface.hpp"

#include <algorithm>

#include "popcomp/rng.hpp"

namespace popcomp {

namespace {

bool has_value(const ValueAssignment& values, const std::string& variable, const std::string& value) {
    const auto it = values.find(variable);
    return it != values.end() && it->second == value;
}

} // namespace

double surface_expected_loss(const SyntheticSurfaceParams& params, const ValueAssignment& values,
                             Arm arm) {
    double loss = params.base_loss;
    for (const auto& effect : params.value_effects) {
        if (has_value(values, effect.variable, effect.value)) loss += effect.effect;
    }
    for (const auto& effect : params.interaction_effects) {
        if (has_value(values, effect.variable_a, effect.value_a) &&
            has_value(values, effect.variable_b, effect.value_b)) {
            loss += effect.effect;
        }
    }
    if (arm == Arm::treatment) loss += params.treatment_effect;
    return loss;
}

std::vector<double> run_synthetic(const ArmedSystem& armed, const SyntheticSurfaceParams& params) {
    const double expected = surface_expected_loss(params, armed.full_values, armed.arm);

    // Noise streams key off the split seed only, never the arm, so both
    // arms of a pair see identical draws.
    const std::uint64_t split_seed = armed.base.split.seed;
    double split_noise = 0.0;
    if (params.split_noise_sd != 0.0) {
        Rng rng(derive_seed(split_seed, {std::string("split_noise")}));
        split_noise = params.split_noise_sd * rng.next_gaussian();
    }

    std::vector<double> losses;
    losses.reserve(armed.base.split.test_indices.size());
    for (const std::size_t pool_index : armed.base.split.test_indices) {
        double loss = expected + split_noise;
        if (params.instance_noise_sd != 0.0) {
            Rng rng(derive_seed(split_seed, {std::string("instance_noise"),
                                             static_cast<std::uint64_t>(pool_index)}));
            loss += params.instance_noise_sd * rng.next_gaussian();
        }
        if (params.clip_to_unit) loss = std::clamp(loss, 0.0, 1.0);
        losses.push_back(loss);
    }
    return losses;
}

} // namespace popcomp
