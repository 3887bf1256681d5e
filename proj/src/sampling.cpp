#include "popcomp/sampling.hpp"

#include <string>

#include "popcomp/errors.hpp"
#include "popcomp/rng.hpp"

namespace popcomp {

std::string_view arm_name(Arm arm) {
    return arm == Arm::treatment ? "treatment" : "control";
}

std::string_view design_name(Design design) {
    switch (design) {
        case Design::paired: return "paired";
        case Design::independent: return "independent";
        case Design::exhaustive: return "exhaustive";
    }
    return "?";
}

namespace {

std::string draw_value(const MethodVariable& var, Rng& rng) {
    const double u = rng.next_double();
    double cumulative = 0.0;
    for (std::size_t i = 0; i < var.values.size(); ++i) {
        cumulative += var.weights[i];
        if (u < cumulative) return var.values[i];
    }
    return var.values.back();
}

} // namespace

std::vector<SystemConfig> sample_systems(const PopulationSpec& spec, int count,
                                         std::uint64_t master_seed,
                                         std::span<const Split> split_pool) {
    const ValidationReport report = validate_spec(spec);
    if (!report.valid()) {
        throw ConfigError("sample_systems: spec invalid (" + report.violations.front().path +
                          ": " + report.violations.front().message + ")");
    }
    if (count < 1) throw ContractError("sample_systems: count must be >= 1");

    const std::size_t pool_size = spec.data_source.size();
    std::vector<SystemConfig> systems;
    systems.reserve(static_cast<std::size_t>(count));

    for (int i = 1; i <= count; ++i) {
        const auto ordinal = static_cast<std::uint64_t>(i);
        SystemConfig config;
        config.system_id = i;
        config.system_seed = derive_seed(master_seed, {std::string("sys"), ordinal});

        // Independent draw per variable: each variable gets its own stream.
        for (const auto& var : spec.nuisance) {
            Rng rng(derive_seed(master_seed, {std::string("sys"), ordinal, std::string("var"), var.name}));
            config.nuisance_values[var.name] = draw_value(var, rng);
        }

        const std::uint64_t split_seed =
            derive_seed(master_seed, {std::string("sys"), ordinal, std::string("split")});
        if (split_pool.empty()) {
            config.split = draw_split(pool_size, spec.split_policy, split_seed);
        } else {
            Rng rng(split_seed);
            config.split = split_pool[static_cast<std::size_t>(rng.next_below(split_pool.size()))];
        }

        systems.push_back(std::move(config));
    }
    return systems;
}

ArmedSystem make_armed(const SystemConfig& base, Arm arm, const TreatmentContrast& contrast,
                       const ValueAssignment& broad_combination) {
    ArmedSystem armed;
    armed.base = base;
    armed.arm = arm;
    armed.full_values = base.nuisance_values;
    if (contrast.kind == ContrastKind::simple) {
        armed.full_values[contrast.simple.variable.name] =
            arm == Arm::treatment ? contrast.simple.treatment : contrast.simple.control;
    } else {
        for (const auto& [name, value] : broad_combination) {
            armed.full_values[name] = value;
        }
    }
    return armed;
}

namespace {

ArmedSystem arm_system(const SystemConfig& config, Arm arm, const TreatmentContrast& contrast,
                       std::uint64_t assignment_seed) {
    if (contrast.kind == ContrastKind::simple) {
        return make_armed(config, arm, contrast);
    }
    const BroadMethodSpec& broad =
        arm == Arm::treatment ? contrast.broad_treatment : contrast.broad_control;
    const auto combinations = expand_broad_method(broad);
    Rng rng(derive_seed(assignment_seed,
                        {std::string("combo"), static_cast<std::uint64_t>(config.system_id),
                         std::string(arm_name(arm))}));
    const auto pick = static_cast<std::size_t>(rng.next_below(combinations.size()));
    return make_armed(config, arm, contrast, combinations[pick]);
}

} // namespace

std::vector<ArmedSystem> assign_arms(const std::vector<SystemConfig>& configs, Design design,
                                     const TreatmentContrast& contrast, std::uint64_t seed) {
    if (configs.empty()) throw ContractError("assign_arms: no systems");
    if (design == Design::exhaustive) {
        throw ContractError("assign_arms: exhaustive designs are enumerated, not sampled");
    }

    std::vector<ArmedSystem> armed;
    if (design == Design::paired) {
        armed.reserve(configs.size() * 2);
        for (const auto& config : configs) {
            armed.push_back(arm_system(config, Arm::treatment, contrast, seed));
            armed.push_back(arm_system(config, Arm::control, contrast, seed));
        }
        return armed;
    }

    // Independent: fair coin per system, on a stream disjoint from the
    // nuisance draws.
    armed.reserve(configs.size());
    for (const auto& config : configs) {
        Rng rng(derive_seed(seed, {std::string("assign"), static_cast<std::uint64_t>(config.system_id)}));
        const Arm arm = rng.next_below(2) == 0 ? Arm::treatment : Arm::control;
        armed.push_back(arm_system(config, arm, contrast, seed));
    }
    return armed;
}

} // namespace popcomp
