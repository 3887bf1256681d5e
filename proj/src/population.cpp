#include "popcomp/population.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "popcomp/errors.hpp"

namespace popcomp {

namespace {

constexpr double kWeightSumTolerance = 1e-12;

void check_variable(const MethodVariable& var, const std::string& path, ValidationReport& report) {
    if (var.name.empty()) {
        report.violations.push_back({path + ".name", "variable name must be non-empty"});
    }
    if (var.values.empty()) {
        report.violations.push_back({path + ".values", "variable must have at least one value"});
        return;
    }
    std::set<std::string> seen;
    for (const auto& value : var.values) {
        if (value.empty()) {
            report.violations.push_back({path + ".values", "values must be non-empty strings"});
        }
        if (!seen.insert(value).second) {
            report.violations.push_back({path + ".values", "duplicate value '" + value + "'"});
        }
    }
    if (var.weights.size() != var.values.size()) {
        report.violations.push_back(
            {path + ".weights", "weights must match values in length"});
        return;
    }
    double sum = 0.0;
    for (const double w : var.weights) {
        if (!(w >= 0.0)) {
            report.violations.push_back({path + ".weights", "weights must be non-negative"});
            return;
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > kWeightSumTolerance) {
        report.violations.push_back({path + ".weights", "weights must sum to 1"});
    }
}

void check_broad(const BroadMethodSpec& broad, const std::string& path, ValidationReport& report) {
    if (broad.name.empty()) {
        report.violations.push_back({path + ".name", "broad method name must be non-empty"});
    }
    if (broad.components.empty()) {
        report.violations.push_back({path + ".components", "broad method needs at least one component"});
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < broad.components.size(); ++i) {
        const auto& comp = broad.components[i];
        check_variable(comp, path + ".components[" + std::to_string(i) + "]", report);
        if (!names.insert(comp.name).second) {
            report.violations.push_back(
                {path + ".components", "duplicate component name '" + comp.name + "'"});
        }
    }
}

// Names claimed by the contrast (the treatment/control side of the spec).
std::set<std::string> contrast_variable_names(const TreatmentContrast& contrast) {
    std::set<std::string> names;
    if (contrast.kind == ContrastKind::simple) {
        names.insert(contrast.simple.variable.name);
    } else {
        for (const auto& comp : contrast.broad_treatment.components) names.insert(comp.name);
        for (const auto& comp : contrast.broad_control.components) names.insert(comp.name);
    }
    return names;
}

} // namespace

ValidationReport validate_spec(const PopulationSpec& spec) {
    ValidationReport report;

    // Contrast.
    if (spec.contrast.kind == ContrastKind::simple) {
        const auto& simple = spec.contrast.simple;
        check_variable(simple.variable, "contrast.variable", report);
        const auto& domain = simple.variable.values;
        if (std::find(domain.begin(), domain.end(), simple.treatment) == domain.end()) {
            report.violations.push_back(
                {"contrast.treatment",
                 "value '" + simple.treatment + "' is not in the domain of variable '" +
                     simple.variable.name + "'"});
        }
        if (std::find(domain.begin(), domain.end(), simple.control) == domain.end()) {
            report.violations.push_back(
                {"contrast.control",
                 "value '" + simple.control + "' is not in the domain of variable '" +
                     simple.variable.name + "'"});
        }
        if (simple.treatment == simple.control) {
            report.violations.push_back(
                {"contrast", "treatment and control must name different values"});
        }
    } else {
        check_broad(spec.contrast.broad_treatment, "contrast.treatment", report);
        check_broad(spec.contrast.broad_control, "contrast.control", report);
    }

    // Nuisance variables: valid individually, unique among themselves,
    // and disjoint from the contrast's name scope.
    const std::set<std::string> contrast_names = contrast_variable_names(spec.contrast);
    std::set<std::string> nuisance_names;
    for (std::size_t i = 0; i < spec.nuisance.size(); ++i) {
        const auto& var = spec.nuisance[i];
        const std::string path = "nuisance[" + std::to_string(i) + "]";
        check_variable(var, path, report);
        if (!nuisance_names.insert(var.name).second) {
            report.violations.push_back({path, "duplicate nuisance variable '" + var.name + "'"});
        }
        if (contrast_names.count(var.name) != 0) {
            report.violations.push_back(
                {path, "nuisance variable '" + var.name + "' collides with the contrast"});
        }
    }

    // Executor reference.
    if (spec.executor_id.empty()) {
        report.violations.push_back({"executor", "executor_id must be non-empty"});
    }

    // Data source.
    switch (spec.data_source.kind) {
        case DataSource::Kind::synthetic_corpus:
            if (spec.data_source.n_docs < 2) {
                report.violations.push_back({"data.n_docs", "synthetic corpus needs at least 2 documents"});
            }
            if (spec.data_source.vocab_size < 2) {
                report.violations.push_back({"data.vocab_size", "vocabulary needs at least 2 tokens"});
            }
            if (spec.data_source.doc_length < 1) {
                report.violations.push_back({"data.doc_length", "documents need at least 1 token"});
            }
            if (!(spec.data_source.class_signal_strength >= 0.0 &&
                  spec.data_source.class_signal_strength <= 1.0)) {
                report.violations.push_back(
                    {"data.class_signal_strength", "signal strength must lie in [0,1]"});
            }
            break;
        case DataSource::Kind::index_pool:
            if (spec.data_source.pool_size < 2) {
                report.violations.push_back({"data.size", "index pool needs at least 2 instances"});
            }
            break;
        case DataSource::Kind::inline_pool:
            if (spec.data_source.instances.size() < 2) {
                report.violations.push_back({"data.instances", "inline pool needs at least 2 instances"});
            }
            if (spec.data_source.classes.empty()) {
                report.violations.push_back({"data.classes", "inline pool must declare its class set"});
            } else {
                for (const auto& [text, label] : spec.data_source.instances) {
                    (void)text;
                    if (std::find(spec.data_source.classes.begin(), spec.data_source.classes.end(),
                                  label) == spec.data_source.classes.end()) {
                        report.violations.push_back(
                            {"data.instances", "label '" + label + "' is not in the class set"});
                        break;
                    }
                }
            }
            break;
    }

    // Split policy must be resolvable against the pool.
    if (spec.data_source.size() >= 2) {
        try {
            resolve_split_sizes(spec.data_source.size(), spec.split_policy);
        } catch (const SizingError& e) {
            report.violations.push_back({"split", e.what()});
        }
    }

    // Exclusions. Every satisfiable exclusion is an error by design: the
    // population must be shrunk at the domain level, not filtered.
    for (std::size_t i = 0; i < spec.exclusions.size(); ++i) {
        const auto& exclusion = spec.exclusions[i];
        const std::string path = "exclusions[" + std::to_string(i) + "]";
        if (exclusion.empty()) {
            report.violations.push_back({path, "empty exclusion matches every combination"});
            continue;
        }
        bool well_formed = true;
        for (const auto& [name, value] : exclusion) {
            const MethodVariable* var = nullptr;
            for (const auto& candidate : spec.nuisance) {
                if (candidate.name == name) { var = &candidate; break; }
            }
            if (var == nullptr && spec.contrast.kind == ContrastKind::simple &&
                spec.contrast.simple.variable.name == name) {
                var = &spec.contrast.simple.variable;
            }
            if (var == nullptr) {
                report.violations.push_back({path, "exclusion references undeclared variable '" + name + "'"});
                well_formed = false;
                continue;
            }
            if (std::find(var->values.begin(), var->values.end(), value) == var->values.end()) {
                report.violations.push_back(
                    {path, "exclusion value '" + value + "' is outside the domain of '" + name + "'"});
                well_formed = false;
            }
        }
        if (well_formed) {
            report.violations.push_back(
                {path,
                 "excluded combination is reachable; remove it from the declared domains "
                 "instead of excluding it"});
        }
    }

    return report;
}

std::uint64_t nuisance_combination_count(const PopulationSpec& spec) {
    const ValidationReport report = validate_spec(spec);
    if (!report.valid()) {
        throw ConfigError("nuisance_combination_count: spec invalid (" +
                          report.violations.front().path + ": " +
                          report.violations.front().message + ")");
    }
    std::uint64_t count = 1;
    for (const auto& var : spec.nuisance) {
        count *= static_cast<std::uint64_t>(var.values.size());
    }
    return count;
}

std::vector<ValueAssignment> expand_variables(const std::vector<MethodVariable>& variables) {
    std::vector<ValueAssignment> combinations;
    std::uint64_t total = 1;
    for (const auto& var : variables) {
        if (var.values.empty()) return {};
        total *= static_cast<std::uint64_t>(var.values.size());
    }
    combinations.reserve(total);

    // Odometer: last variable fastest.
    std::vector<std::size_t> idx(variables.size(), 0);
    for (std::uint64_t n = 0; n < total; ++n) {
        ValueAssignment combo;
        for (std::size_t v = 0; v < variables.size(); ++v) {
            combo[variables[v].name] = variables[v].values[idx[v]];
        }
        combinations.push_back(std::move(combo));
        for (std::size_t v = variables.size(); v-- > 0;) {
            if (++idx[v] < variables[v].values.size()) break;
            idx[v] = 0;
        }
    }
    return combinations;
}

std::vector<ValueAssignment> expand_broad_method(const BroadMethodSpec& broad) {
    return expand_variables(broad.components);
}

} // namespace popcomp
