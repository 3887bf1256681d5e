#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "popcomp/splits.hpp"

namespace popcomp {

// A complete assignment of values to variables (variable name -> value).
// std::map keeps iteration deterministic.
using ValueAssignment = std::map<std::string, std::string>;

struct Violation {
    std::string path;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool valid() const { return violations.empty(); }
};

// One pipeline element: a variable whose values range over a finite set
// of methods. Defaults to the uniform distribution over its values.
struct MethodVariable {
    std::string name;
    std::vector<std::string> values;
    std::vector<double> weights;

    MethodVariable() = default;
    MethodVariable(std::string name_, std::vector<std::string> values_)
        : name(std::move(name_)), values(std::move(values_)) {
        weights.assign(values.size(), values.empty() ? 0.0 : 1.0 / static_cast<double>(values.size()));
    }
    MethodVariable(std::string name_, std::vector<std::string> values_, std::vector<double> weights_)
        : name(std::move(name_)), values(std::move(values_)), weights(std::move(weights_)) {}
};

// A method in the broad sense: a named set of component variables, each
// with its own domain of concrete method components.
struct BroadMethodSpec {
    std::string name;
    std::vector<MethodVariable> components;
};

enum class ContrastKind { simple, broad };

// Simple contrast: one variable, two of its values under comparison.
// The variable carries its full domain so that membership is checkable.
struct SimpleContrast {
    MethodVariable variable;
    std::string treatment;
    std::string control;
};

// Treatment method vs control method. Either a single variable's value
// pair or two broad methods with their own component spaces.
struct TreatmentContrast {
    ContrastKind kind = ContrastKind::simple;
    SimpleContrast simple;
    BroadMethodSpec broad_treatment;
    BroadMethodSpec broad_control;

    std::string treatment_label() const {
        return kind == ContrastKind::simple ? simple.treatment : broad_treatment.name;
    }
    std::string control_label() const {
        return kind == ContrastKind::simple ? simple.control : broad_control.name;
    }
};

// Where the data pool comes from.
struct DataSource {
    enum class Kind { synthetic_corpus, index_pool, inline_pool };
    Kind kind = Kind::index_pool;

    // synthetic_corpus
    std::size_t n_docs = 0;
    std::size_t vocab_size = 0;
    double class_signal_strength = 0.0;
    std::size_t doc_length = 0;

    // index_pool
    std::size_t pool_size = 0;

    // inline_pool
    std::vector<std::pair<std::string, std::string>> instances; // (text, label)
    std::vector<std::string> classes;

    // Number of instances the realized pool will hold.
    std::size_t size() const {
        switch (kind) {
            case Kind::synthetic_corpus: return n_docs;
            case Kind::index_pool: return pool_size;
            case Kind::inline_pool: return instances.size();
        }
        return 0;
    }
};

// Declarative description of a population of processing systems: the
// contrast under study, the nuisance variables that vary across the
// population, the data source, and how each system splits it.
struct PopulationSpec {
    TreatmentContrast contrast;
    std::vector<MethodVariable> nuisance;
    DataSource data_source;
    SplitPolicy split_policy;
    std::string executor_id;

    // Combinations declared incompatible with one of the arms. Any entry
    // that is satisfiable within the declared domains is reported as a
    // validation error: silently skipping it would change the population,
    // so the user must shrink the domains instead.
    std::vector<ValueAssignment> exclusions;
};

// Checks every invariant and returns all violations with a path to the
// offending field. Pure and idempotent; valid specs yield an empty report.
ValidationReport validate_spec(const PopulationSpec& spec);

// Product of nuisance-variable domain sizes (1 for no nuisance variables).
// Throws ConfigError if the spec is invalid.
std::uint64_t nuisance_combination_count(const PopulationSpec& spec);

// Full cross-product of variable domains in lexicographic order: the
// first variable varies slowest, the last fastest.
std::vector<ValueAssignment> expand_variables(const std::vector<MethodVariable>& variables);

// All component combinations of one broad method, lexicographically.
std::vector<ValueAssignment> expand_broad_method(const BroadMethodSpec& broad);

} // namespace popcomp
