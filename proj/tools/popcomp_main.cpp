#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "popcomp/config.hpp"
#include "popcomp/errors.hpp"
#include "popcomp/runner.hpp"
#include "popcomp/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

int env_parallelism_override() {
    const char* value = std::getenv("POPCOMP_PARALLELISM");
    if (value == nullptr || *value == '\0') return 0;
    const long parsed = std::strtol(value, nullptr, 10);
    if (parsed < 1 || parsed > 1024) return 0;
    return static_cast<int>(parsed);
}

popcomp::ExperimentSpec load_spec(const std::string& path) {
    popcomp::ExperimentSpec spec = popcomp::load_experiment_file(path);
    if (const int override = env_parallelism_override(); override > 0) {
        spec.parallelism = override;
    }
    return spec;
}

int do_validate(const std::string& config_path) {
    const popcomp::ExperimentSpec spec = load_spec(config_path);
    const popcomp::ExecutorRegistry registry = popcomp::builtin_registry(spec.surface);
    const popcomp::ValidationReport report = popcomp::validate_experiment(spec, registry);
    if (report.valid()) {
        std::cout << "valid: " << config_path << " (" << spec.digest << ")\n";
        return kExitOk;
    }
    for (const auto& violation : report.violations) {
        std::cout << violation.path << ": " << violation.message << "\n";
    }
    std::cout << report.violations.size() << " violation(s)\n";
    return kExitValidation;
}

void print_summary(const popcomp::ReportBundle& bundle) {
    const popcomp::ATEReport& report = bundle.report;
    std::printf("design: %s   systems: %zu   metric: %s\n",
                std::string(popcomp::design_name(report.design)).c_str(),
                report.design == popcomp::Design::independent
                    ? report.ege_treatment.systems + report.ege_control.systems
                    : report.ege_treatment.systems,
                report.metric.metric_id.c_str());
    std::printf("EGE[%s] = %.6f  (SE %.6f, S=%zu)\n", report.ege_treatment.method_label.c_str(),
                report.ege_treatment.value, report.ege_treatment.standard_error,
                report.ege_treatment.systems);
    std::printf("EGE[%s] = %.6f  (SE %.6f, S=%zu)\n", report.ege_control.method_label.c_str(),
                report.ege_control.value, report.ege_control.standard_error,
                report.ege_control.systems);
    std::printf("ATE = %.6f\n", report.ate);
    if (report.has_interval) {
        std::printf("%.0f%% CI (%s) = [%.6f, %.6f]\n", report.confidence_interval.level * 100.0,
                    std::string(popcomp::interval_method_name(report.confidence_interval.method)).c_str(),
                    report.confidence_interval.lo, report.confidence_interval.hi);
    }
    if (report.has_test) {
        const popcomp::TestResult& test = report.test_result;
        std::printf("test %s: statistic=%.6f p=%.6g K=%llu alpha=%g -> %s\n", test.test_id.c_str(),
                    test.statistic, test.p_value,
                    static_cast<unsigned long long>(test.resamples), test.alpha,
                    test.reject ? "reject" : "no rejection");
    }
}

int do_run(const std::string& config_path, bool require_surface, bool force_exhaustive) {
    popcomp::ExperimentSpec spec = load_spec(config_path);
    if (require_surface && spec.population.executor_id != "synthetic_surface") {
        std::cerr << "simulate expects the synthetic_surface executor, config uses '"
                  << spec.population.executor_id << "'\n";
        return kExitValidation;
    }
    if (force_exhaustive && spec.design != popcomp::Design::exhaustive) {
        std::cerr << "oracle expects design=exhaustive, config uses '"
                  << std::string(popcomp::design_name(spec.design)) << "'\n";
        return kExitValidation;
    }

    const popcomp::ExecutorRegistry registry = popcomp::builtin_registry(spec.surface);
    const popcomp::ValidationReport validation = popcomp::validate_experiment(spec, registry);
    if (!validation.valid()) {
        for (const auto& violation : validation.violations) {
            std::cout << violation.path << ": " << violation.message << "\n";
        }
        return kExitValidation;
    }

    const popcomp::ReportBundle bundle = popcomp::run_experiment(spec, registry);
    if (spec.has_output) {
        popcomp::emit_report(bundle, spec.output);
        std::cout << "report: " << spec.output.report_path << "\n";
        std::cout << "runs table: " << spec.output.runs_table_path << "\n";
    }
    print_summary(bundle);
    return kExitOk;
}

int do_report(const std::string& report_path) {
    std::ifstream in(report_path, std::ios::binary);
    if (!in) {
        std::cerr << "cannot open '" << report_path << "'\n";
        return kExitRuntime;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "not a report file: " << e.what() << "\n";
        return kExitValidation;
    }

    std::printf("tool: %s %s\n", j.value("tool", std::string("?")).c_str(),
                j.value("version", std::string("?")).c_str());
    std::printf("design: %s   systems: %llu   digest: %s\n",
                j.value("design", std::string("?")).c_str(),
                static_cast<unsigned long long>(j.value("systems", 0ULL)),
                j.value("spec_digest", std::string("?")).c_str());
    for (const char* key : {"ege_treatment", "ege_control"}) {
        if (j.contains(key)) {
            const auto& ege = j[key];
            std::printf("EGE[%s] = %.6f  (SE %.6f)\n",
                        ege.value("label", std::string("?")).c_str(), ege.value("value", 0.0),
                        ege.value("standard_error", 0.0));
        }
    }
    std::printf("ATE = %.6f\n", j.value("ate", 0.0));
    if (j.contains("confidence_interval")) {
        const auto& ci = j["confidence_interval"];
        std::printf("%.0f%% CI (%s) = [%.6f, %.6f]\n", ci.value("level", 0.0) * 100.0,
                    ci.value("method", std::string("?")).c_str(), ci.value("lo", 0.0),
                    ci.value("hi", 0.0));
    }
    if (j.contains("test")) {
        const auto& test = j["test"];
        std::printf("test %s: statistic=%.6f p=%.6g K=%llu alpha=%g -> %s\n",
                    test.value("id", std::string("?")).c_str(), test.value("statistic", 0.0),
                    test.value("p_value", 0.0),
                    static_cast<unsigned long long>(test.value("resamples", 0ULL)),
                    test.value("alpha", 0.0),
                    test.value("reject", false) ? "reject" : "no rejection");
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal comparison of methods across populations of ML processing pipelines"};
    app.set_version_flag("--version", std::string(popcomp::kToolName) + " " +
                                          std::string(popcomp::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::string report_path;

    CLI::App* validate = app.add_subcommand("validate", "Check an experiment config");
    validate->add_option("config", config_path, "experiment JSON file")->required();

    CLI::App* run = app.add_subcommand("run", "Run a sampled or exhaustive experiment");
    run->add_option("config", config_path, "experiment JSON file")->required();

    CLI::App* oracle = app.add_subcommand("oracle", "Exact brute-force evaluation (design=exhaustive)");
    oracle->add_option("config", config_path, "experiment JSON file")->required();

    CLI::App* simulate = app.add_subcommand("simulate", "Run a synthetic-surface experiment");
    simulate->add_option("config", config_path, "experiment JSON file")->required();

    CLI::App* report = app.add_subcommand("report", "Re-render an emitted report");
    report->add_option("bundle", report_path, "report JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return do_validate(config_path);
        if (run->parsed()) return do_run(config_path, false, false);
        if (oracle->parsed()) return do_run(config_path, false, true);
        if (simulate->parsed()) return do_run(config_path, true, false);
        if (report->parsed()) return do_report(report_path);
    } catch (const popcomp::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
