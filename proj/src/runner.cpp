#include "popcomp/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "popcomp/data.hpp"
#include "popcomp/errors.hpp"
#include "popcomp/numeric.hpp"
#include "popcomp/oracle.hpp"
#include "popcomp/rng.hpp"
#include "popcomp/sampling.hpp"
#include "popcomp/version.hpp"

namespace popcomp {

namespace {

std::vector<std::string> value_columns_for(const PopulationSpec& population) {
    std::vector<std::string> columns;
    std::set<std::string> seen;
    auto push = [&](const std::string& name) {
        if (seen.insert(name).second) columns.push_back(name);
    };
    if (population.contrast.kind == ContrastKind::simple) {
        push(population.contrast.simple.variable.name);
    } else {
        for (const auto& comp : population.contrast.broad_treatment.components) push(comp.name);
        for (const auto& comp : population.contrast.broad_control.components) push(comp.name);
    }
    for (const auto& var : population.nuisance) push(var.name);
    return columns;
}

void sort_records(std::vector<RunRecord>& records) {
    std::stable_sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
        if (a.system_id != b.system_id) return a.system_id < b.system_id;
        return a.arm == Arm::treatment && b.arm == Arm::control;
    });
}

void write_partial_manifest(const ExperimentSpec& spec, const std::vector<RunRecord>& records,
                            const std::vector<unsigned char>& done,
                            const std::vector<std::string>& errors) {
    if (!spec.has_output) return;
    const std::string path = spec.output.report_path + ".partial";
    std::error_code ec;
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) return;
    out << "partial run manifest (" << spec.digest << ")\n";
    std::size_t completed = 0;
    for (const unsigned char flag : done) completed += flag;
    out << "completed " << completed << " of " << done.size() << " runs\n";
    for (std::size_t i = 0; i < done.size(); ++i) {
        if (done[i]) {
            out << "ok," << records[i].system_id << ',' << arm_name(records[i].arm) << '\n';
        } else {
            out << "failed,run_index=" << i << ',' << errors[i] << '\n';
        }
    }
}

std::vector<RunRecord> execute_all(const ExperimentSpec& spec, const ExecutorRegistry& registry,
                                   const DataPool& pool, const std::vector<ArmedSystem>& armed) {
    std::vector<RunRecord> records(armed.size());
    std::vector<unsigned char> done(armed.size(), 0);
    std::vector<std::string> errors(armed.size());

    parallel_for(armed.size(), spec.parallelism, [&](std::size_t i) {
        try {
            records[i] = execute_system(armed[i], pool, registry, spec.population.executor_id,
                                        spec.metric);
            done[i] = 1;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    for (std::size_t i = 0; i < done.size(); ++i) {
        if (!done[i]) {
            write_partial_manifest(spec, records, done, errors);
            throw ExecutorError("run aborted: " + errors[i] +
                                (spec.has_output ? " (partial manifest written next to the report)"
                                                 : ""));
        }
    }
    return records;
}

TestResult run_configured_test(const ExperimentSpec& spec, std::span<const double> ites,
                               std::span<const double> means_t, std::span<const double> means_c) {
    ResamplingOptions options;
    options.resamples = spec.inference.resamples;
    options.alpha = spec.inference.alpha;
    options.seed = derive_seed(spec.master_seed, {std::string("test")});

    if (spec.inference.test == "sign_flip") {
        return paired_system_test(ites, PairedTestMode::sign_flip, options, spec.inference.sidedness);
    }
    if (spec.inference.test == "system_bootstrap") {
        return paired_system_test(ites, PairedTestMode::bootstrap, options, spec.inference.sidedness);
    }
    if (spec.inference.test == "permutation") {
        return independent_system_test(means_t, means_c, options, spec.inference.sidedness);
    }
    throw ContractError("run_configured_test: no test configured");
}

} // namespace

ReportBundle run_experiment(const ExperimentSpec& spec, const ExecutorRegistry& registry) {
    {
        const ValidationReport validation = validate_experiment(spec, registry);
        if (!validation.valid()) {
            throw ConfigError("experiment invalid: " + validation.violations.front().path + ": " +
                              validation.violations.front().message);
        }
    }

    const DataPool pool = pool_from_source(spec.population.data_source, spec.master_seed);

    ReportBundle bundle;
    bundle.version = std::string(kVersion);
    bundle.spec_echo_json = spec.echo_json;
    bundle.value_columns = value_columns_for(spec.population);

    ATEReport& report = bundle.report;
    report.design = spec.design;
    report.master_seed = spec.master_seed;
    report.spec_digest = spec.digest;
    report.metric = spec.metric;

    const std::string label_t = spec.population.contrast.treatment_label();
    const std::string label_c = spec.population.contrast.control_label();

    if (spec.design == Design::exhaustive) {
        const SplitUniverse universe = SplitUniverse::from_seeds(
            pool.instances.size(), spec.population.split_policy, spec.universe_seeds);
        ExhaustiveResult exact = run_exhaustive(spec.population, registry, universe, spec.metric,
                                                pool, spec.budget, spec.parallelism);
        report.ege_treatment = ege_from_means(std::move(exact.treatment_means), label_t);
        report.ege_control = ege_from_means(std::move(exact.control_means), label_c);
        report.ate = ate_hat(report.ege_treatment, report.ege_control);
        report.ites = std::move(exact.ites);
        bundle.runs = std::move(exact.records);
    } else {
        std::vector<Split> universe_splits;
        if (!spec.universe_seeds.empty()) {
            universe_splits = SplitUniverse::from_seeds(pool.instances.size(),
                                                        spec.population.split_policy,
                                                        spec.universe_seeds)
                                  .splits;
        }
        const std::vector<SystemConfig> systems =
            sample_systems(spec.population, spec.systems, spec.master_seed, universe_splits);
        const std::vector<ArmedSystem> armed =
            assign_arms(systems, spec.design, spec.population.contrast,
                        derive_seed(spec.master_seed, {std::string("arms")}));

        std::vector<RunRecord> records = execute_all(spec, registry, pool, armed);
        sort_records(records);

        std::vector<RunRecord> treatment_records, control_records;
        for (auto& record : records) {
            (record.arm == Arm::treatment ? treatment_records : control_records)
                .push_back(record);
        }

        if (spec.design == Design::paired) {
            report.ites.reserve(systems.size());
            for (std::size_t i = 0; i < treatment_records.size(); ++i) {
                report.ites.push_back(ite_hat(treatment_records[i], control_records[i]));
            }
        } else if (treatment_records.empty() || control_records.empty()) {
            throw SizingError(
                "independent design assigned every system to one arm; increase 'systems' or "
                "change the master seed");
        }

        report.ege_treatment = ege_hat(treatment_records, label_t);
        report.ege_control = ege_hat(control_records, label_c);
        report.ate = ate_hat(report.ege_treatment, report.ege_control);
        bundle.runs = std::move(records);
    }

    if (spec.interval.enabled) {
        const std::uint64_t seed = derive_seed(spec.master_seed, {std::string("interval")});
        if (spec.design == Design::independent) {
            report.confidence_interval = ate_interval_independent(
                report.ege_treatment.per_system_means, report.ege_control.per_system_means,
                spec.interval.level, spec.interval.method, spec.interval.resamples, seed);
        } else {
            report.confidence_interval =
                ate_interval_paired(report.ites, spec.interval.level, spec.interval.method,
                                    spec.interval.resamples, seed);
        }
        report.has_interval = true;
    }

    if (spec.inference.test != "none") {
        report.test_result =
            run_configured_test(spec, report.ites, report.ege_treatment.per_system_means,
                                report.ege_control.per_system_means);
        report.has_test = true;
    }

    return bundle;
}

// ---------------------------------------------------------------------------
// Serialization. Hand-rolled so the byte stream is fully pinned: fixed
// field order, "%.17g" for every double, no locale involvement.

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (const char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

class JsonWriter {
public:
    std::string str() && { return std::move(out_); }

    void open() { out_ += "{\n"; depth_ += 1; }
    void close(bool trailing_newline) {
        depth_ -= 1;
        out_ += '\n';
        indent();
        out_ += '}';
        if (trailing_newline) out_ += '\n';
    }

    void object_key(const std::string& key) {
        comma();
        indent();
        out_ += '"' + json_escape(key) + "\": ";
        first_ = true;
    }

    void nested_open() { out_ += "{\n"; depth_ += 1; }
    void nested_close() {
        depth_ -= 1;
        out_ += '\n';
        indent();
        out_ += '}';
        first_ = false;
    }

    void field(const std::string& key, const std::string& string_value) {
        object_key(key);
        out_ += '"' + json_escape(string_value) + '"';
        first_ = false;
    }
    void field(const std::string& key, double value) {
        object_key(key);
        out_ += format_double(value);
        first_ = false;
    }
    void field(const std::string& key, std::uint64_t value) {
        object_key(key);
        out_ += std::to_string(value);
        first_ = false;
    }
    void field(const std::string& key, bool value) {
        object_key(key);
        out_ += value ? "true" : "false";
        first_ = false;
    }
    void field_array(const std::string& key, const std::vector<double>& values) {
        object_key(key);
        out_ += '[';
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i != 0) out_ += ", ";
            out_ += format_double(values[i]);
        }
        out_ += ']';
        first_ = false;
    }
    // Splices a pre-serialized JSON value verbatim.
    void field_raw(const std::string& key, const std::string& raw_json) {
        object_key(key);
        out_ += raw_json;
        first_ = false;
    }

private:
    void comma() {
        if (!first_) out_ += ",\n";
        first_ = false;
    }
    void indent() {
        for (int i = 0; i < depth_; ++i) out_ += "  ";
    }

    std::string out_;
    int depth_ = 0;
    bool first_ = true;
};

void write_ege(JsonWriter& w, const std::string& key, const EGEEstimate& ege) {
    w.object_key(key);
    w.nested_open();
    w.field("label", ege.method_label);
    w.field("value", ege.value);
    w.field("systems", static_cast<std::uint64_t>(ege.systems));
    w.field("standard_error", ege.standard_error);
    w.field_array("per_system_means", ege.per_system_means);
    w.nested_close();
}

std::string metric_orientation_name(const MetricSpec& metric) {
    return metric.orientation == MetricSpec::Orientation::lower_is_better ? "lower_is_better"
                                                                          : "higher_is_better";
}

} // namespace

std::string render_report_json(const ReportBundle& bundle) {
    const ATEReport& report = bundle.report;
    JsonWriter w;
    w.open();
    w.field("tool", std::string(kToolName));
    w.field("version", bundle.version);
    w.field("design", std::string(design_name(report.design)));
    w.object_key("metric");
    w.nested_open();
    w.field("id", report.metric.metric_id);
    w.field("orientation", metric_orientation_name(report.metric));
    w.nested_close();
    w.field("master_seed", report.master_seed);
    w.field("spec_digest", report.spec_digest);
    w.field("systems",
            static_cast<std::uint64_t>(report.design == Design::independent
                                           ? report.ege_treatment.systems +
                                                 report.ege_control.systems
                                           : report.ege_treatment.systems));
    w.field("ate", report.ate);
    write_ege(w, "ege_treatment", report.ege_treatment);
    write_ege(w, "ege_control", report.ege_control);
    if (!report.ites.empty()) {
        w.field_array("ites", report.ites);
    }
    if (report.has_interval) {
        w.object_key("confidence_interval");
        w.nested_open();
        w.field("lo", report.confidence_interval.lo);
        w.field("hi", report.confidence_interval.hi);
        w.field("level", report.confidence_interval.level);
        w.field("method", std::string(interval_method_name(report.confidence_interval.method)));
        w.nested_close();
    }
    if (report.has_test) {
        const TestResult& test = report.test_result;
        w.object_key("test");
        w.nested_open();
        w.field("id", test.test_id);
        w.field("statistic", test.statistic);
        w.field("p_value", test.p_value);
        w.field("resamples", test.resamples);
        w.field("alpha", test.alpha);
        w.field("reject", test.reject);
        w.field("seed", test.seed);
        w.field("sidedness", std::string(sidedness_name(test.sidedness)));
        w.nested_close();
    }
    w.field_raw("spec_echo", bundle.spec_echo_json);
    w.close(true);
    return std::move(w).str();
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::string render_runs_table(const ReportBundle& bundle) {
    std::string out = "system_id,arm";
    for (const auto& column : bundle.value_columns) out += ',' + csv_escape(column);
    out += ",split_seed,N,M,mean_loss\n";

    for (const auto& record : bundle.runs) {
        out += std::to_string(record.system_id);
        out += ',';
        out += arm_name(record.arm);
        for (const auto& column : bundle.value_columns) {
            out += ',';
            const auto it = record.full_values.find(column);
            if (it != record.full_values.end()) out += csv_escape(it->second);
        }
        out += ',' + std::to_string(record.split_seed);
        out += ',' + std::to_string(record.n_train);
        out += ',' + std::to_string(record.n_test);
        out += ',' + format_double(record.mean_loss);
        out += '\n';
    }
    return out;
}

void emit_report(const ReportBundle& bundle, const OutputSpec& output) {
    if (output.report_path.empty() || output.runs_table_path.empty()) {
        throw ConfigError("emit_report: output paths are not configured");
    }
    for (const std::string& path : {output.report_path, output.runs_table_path}) {
        const auto parent = std::filesystem::path(path).parent_path();
        if (!parent.empty()) {
            std::error_code ec;
            std::filesystem::create_directories(parent, ec);
            if (ec) throw Error("emit_report: cannot create '" + parent.string() + "': " + ec.message());
        }
    }

    const std::string report_json = render_report_json(bundle);
    const std::string runs_table = render_runs_table(bundle);

    std::ofstream report_out(output.report_path, std::ios::binary);
    if (!report_out) throw Error("emit_report: cannot write '" + output.report_path + "'");
    report_out << report_json;
    report_out.close();
    if (!report_out) throw Error("emit_report: failed writing '" + output.report_path + "'");

    std::ofstream runs_out(output.runs_table_path, std::ios::binary);
    if (!runs_out) throw Error("emit_report: cannot write '" + output.runs_table_path + "'");
    runs_out << runs_table;
    runs_out.close();
    if (!runs_out) throw Error("emit_report: failed writing '" + output.runs_table_path + "'");
}

} // namespace popcomp
