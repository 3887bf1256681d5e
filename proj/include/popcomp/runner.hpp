#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "popcomp/config.hpp"
#include "popcomp/estimation.hpp"
#include "popcomp/executor.hpp"
#include "popcomp/inference.hpp"

namespace popcomp {

// Machine-readable estimator output with full reproducibility info.
struct ATEReport {
    EGEEstimate ege_treatment;
    EGEEstimate ege_control;
    double ate = 0.0;
    Design design = Design::paired;

    // Per-pair treatment-effect estimates; empty (and omitted from the
    // serialized report) for independent designs.
    std::vector<double> ites;

    bool has_interval = false;
    Interval confidence_interval;
    bool has_test = false;
    TestResult test_result;

    std::uint64_t master_seed = 0;
    std::string spec_digest;
    MetricSpec metric;
};

struct ReportBundle {
    ATEReport report;
    std::vector<RunRecord> runs; // sorted by (system_id, arm), treatment first
    std::vector<std::string> value_columns; // method-variable column order of the runs table
    std::string spec_echo_json;  // canonical config echo
    std::string version;
};

// Orchestrates the full experiment: sample -> assign arms -> execute
// (parallel up to spec.parallelism) -> estimate -> interval -> test.
// Deterministic for a fixed spec regardless of the parallelism level.
// Executor failures write "<report path>.partial" (when output paths are
// configured) listing completed runs, then raise ExecutorError.
ReportBundle run_experiment(const ExperimentSpec& spec, const ExecutorRegistry& registry);

// Deterministic serializations: fixed field order, 17 significant digits
// for every floating-point value.
std::string render_report_json(const ReportBundle& bundle);
std::string render_runs_table(const ReportBundle& bundle);

// Writes the report JSON and the runs table, creating parent directories.
void emit_report(const ReportBundle& bundle, const OutputSpec& output);

} // namespace popcomp
