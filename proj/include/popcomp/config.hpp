#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "popcomp/estimation.hpp"
#include "popcomp/executor.hpp"
#include "popcomp/inference.hpp"
#include "popcomp/population.hpp"
#include "popcomp/sampling.hpp"
#include "popcomp/surface.hpp"

namespace popcomp {

struct InferenceSpec {
    std::string test = "none"; // none | sign_flip | system_bootstrap | permutation | shifted_bootstrap
    std::uint64_t resamples = 10000;
    double alpha = 0.05;
    Sidedness sidedness = Sidedness::two_sided;
};

struct IntervalSpec {
    bool enabled = false;
    IntervalMethod method = IntervalMethod::normal;
    double level = 0.95;
    std::uint64_t resamples = 10000;
};

struct OutputSpec {
    std::string report_path;
    std::string runs_table_path;
};

// A complete experiment: the population, the design, estimator and
// inference settings, the master seed, and output destinations. Seeds are
// mandatory; the harness never draws entropy of its own.
struct ExperimentSpec {
    PopulationSpec population;
    Design design = Design::paired;
    int systems = 0; // S; >= 2 for sampled designs
    MetricSpec metric;
    InferenceSpec inference;
    IntervalSpec interval;
    std::uint64_t master_seed = 0;
    OutputSpec output;
    bool has_output = false;
    int parallelism = 1;

    SyntheticSurfaceParams surface; // parameters for the synthetic_surface executor

    // Split universe seeds: required for exhaustive designs; when present
    // for sampled designs, system splits are drawn from this universe so
    // Monte Carlo estimates target the same finite population the oracle
    // evaluates.
    std::vector<std::uint64_t> universe_seeds;

    std::uint64_t budget = 10000;

    std::string echo_json; // canonical re-serialization of the config
    std::string digest;    // content digest of echo_json
};

// Parses the strict JSON experiment document. Unknown keys anywhere are
// errors, as is a missing master_seed. Throws ConfigError with the path
// of the offending key.
ExperimentSpec parse_experiment_config(const std::string& text);

ExperimentSpec load_experiment_file(const std::string& path);

// Population invariants plus harness-level consistency (registered
// executor, design/test compatibility, metric/executor compatibility,
// sample size, universe availability).
ValidationReport validate_experiment(const ExperimentSpec& spec, const ExecutorRegistry& registry);

} // namespace popcomp
