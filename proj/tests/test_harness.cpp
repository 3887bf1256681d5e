#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "popcomp/config.hpp"
#include "popcomp/data.hpp"
#include "popcomp/errors.hpp"
#include "popcomp/oracle.hpp"
#include "popcomp/runner.hpp"

using namespace popcomp;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

fs::path fresh_temp_dir(const std::string& tag) {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() /
                         ("popcomp_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                          std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

std::string surface_config_text(int systems, const std::string& design,
                                const std::string& test = "sign_flip") {
    std::ostringstream out;
    out << R"({
  "master_seed": 808,
  "design": ")" << design << R"(",
  "systems": )" << systems << R"(,
  "metric": {"id": "surface_loss"},
  "population": {
    "executor": "synthetic_surface",
    "contrast": {"kind": "simple", "variable": "method", "treatment": "a", "control": "b"},
    "nuisance": [
      {"name": "context", "values": ["w", "x", "y"]},
      {"name": "scale", "values": ["p", "q"]}
    ],
    "data": {"kind": "index_pool", "size": 20},
    "split": {"train_fraction": 0.5}
  },
  "surface": {
    "base_loss": 0.3,
    "treatment_effect": 0.05,
    "value_effects": [{"variable": "context", "value": "w", "effect": 0.04}],
    "split_noise_sd": 0.02,
    "instance_noise_sd": 0.05
  },
  "inference": {"test": ")" << test << R"(", "resamples": 2000, "alpha": 0.05},
  "interval": {"method": "normal", "level": 0.95}
})";
    return out.str();
}

} // namespace

TEST_CASE("tutorial config parses to the expected experiment") {
    const ExperimentSpec spec = load_experiment_file(std::string(POPCOMP_CONFIG_DIR) +
                                                     "/tutorial.json");
    CHECK(spec.systems == 200);
    CHECK(spec.design == Design::paired);
    CHECK(spec.master_seed == 20260811);
    CHECK(spec.population.executor_id == "text_pipeline");
    CHECK(spec.population.nuisance.size() == 3);
    CHECK(spec.metric.metric_id == "zero_one_error");
    CHECK(spec.inference.test == "sign_flip");
    CHECK(spec.interval.enabled);
    CHECK(spec.has_output);
    CHECK(validate_experiment(spec, builtin_registry(spec.surface)).valid());
}

TEST_CASE("all shipped configs parse and validate") {
    for (const char* name : {"tutorial.json", "oracle_toy.json", "surface_tau005.json",
                             "calibration_null.json", "independent_surface.json"}) {
        const ExperimentSpec spec =
            load_experiment_file(std::string(POPCOMP_CONFIG_DIR) + "/" + name);
        const ValidationReport report = validate_experiment(spec, builtin_registry(spec.surface));
        for (const auto& violation : report.violations) {
            MESSAGE(name, ": ", violation.path, ": ", violation.message);
        }
        CHECK(report.valid());
    }
}

TEST_CASE("misspelled keys are fatal and named") {
    const std::string text = R"({"master_seed": 1, "desing": "paired"})";
    try {
        parse_experiment_config(text);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("desing") != std::string::npos);
    }
}

TEST_CASE("missing master_seed is fatal") {
    const std::string text = R"({"design": "paired", "systems": 4,
        "metric": {"id": "surface_loss"},
        "population": {"executor": "synthetic_surface",
            "contrast": {"kind": "simple", "variable": "m", "treatment": "a", "control": "b"},
            "data": {"kind": "index_pool", "size": 10},
            "split": {"train_fraction": 0.5}}})";
    try {
        parse_experiment_config(text);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("master_seed") != std::string::npos);
    }
}

TEST_CASE("parse failures carry context") {
    CHECK_THROWS_AS(parse_experiment_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"master_seed": -1})"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(surface_config_text(4, "sideways")), ConfigError);

    // Orientation must match the metric.
    std::string text = surface_config_text(4, "paired");
    text.replace(text.find(R"({"id": "surface_loss"})"),
                 std::string(R"({"id": "surface_loss"})").size(),
                 R"({"id": "surface_loss", "orientation": "higher_is_better"})");
    CHECK_THROWS_AS(parse_experiment_config(text), ConfigError);
}

TEST_CASE("experiment-level validation catches cross-field inconsistencies") {
    // Unregistered executor.
    ExperimentSpec spec = parse_experiment_config(surface_config_text(10, "paired"));
    spec.population.executor_id = "missing";
    CHECK_FALSE(validate_experiment(spec, builtin_registry()).valid());

    // Too few systems for a sampled design.
    spec = parse_experiment_config(surface_config_text(1, "paired"));
    CHECK_FALSE(validate_experiment(spec, builtin_registry()).valid());

    // Wrong test family for the design.
    spec = parse_experiment_config(surface_config_text(10, "independent", "sign_flip"));
    CHECK_FALSE(validate_experiment(spec, builtin_registry()).valid());
    spec = parse_experiment_config(surface_config_text(10, "paired", "permutation"));
    CHECK_FALSE(validate_experiment(spec, builtin_registry()).valid());

    // Metric incompatible with the executor.
    spec = parse_experiment_config(surface_config_text(10, "paired"));
    spec.metric.metric_id = "zero_one_error";
    CHECK_FALSE(validate_experiment(spec, builtin_registry()).valid());

    // Exhaustive without a split universe.
    spec = parse_experiment_config(surface_config_text(10, "exhaustive"));
    CHECK_FALSE(validate_experiment(spec, builtin_registry()).valid());
}

TEST_CASE("paired run produces a consistent bundle") {
    const ExperimentSpec spec = parse_experiment_config(surface_config_text(12, "paired"));
    const ExecutorRegistry registry = builtin_registry(spec.surface);
    const ReportBundle bundle = run_experiment(spec, registry);

    CHECK(bundle.runs.size() == 24); // 2S
    CHECK(bundle.report.ites.size() == 12);
    CHECK(bundle.report.ege_treatment.systems == 12);
    CHECK(bundle.report.has_test);
    CHECK(bundle.report.has_interval);
    CHECK(std::abs(bundle.report.ate -
                   (bundle.report.ege_treatment.value - bundle.report.ege_control.value)) <=
          1e-15);

    // Arm-independent noise: every ITE is exactly the treatment effect.
    for (const double ite : bundle.report.ites) {
        CHECK(std::abs(ite - 0.05) <= 1e-12);
    }

    // Records arrive sorted, treatment before control.
    for (std::size_t i = 0; i < bundle.runs.size(); i += 2) {
        CHECK(bundle.runs[i].system_id == static_cast<int>(i / 2) + 1);
        CHECK(bundle.runs[i].arm == Arm::treatment);
        CHECK(bundle.runs[i + 1].arm == Arm::control);
    }
}

TEST_CASE("independent run omits ites and keeps S rows") {
    const ExperimentSpec spec =
        parse_experiment_config(surface_config_text(30, "independent", "permutation"));
    const ExecutorRegistry registry = builtin_registry(spec.surface);
    const ReportBundle bundle = run_experiment(spec, registry);

    CHECK(bundle.runs.size() == 30); // S rows, one arm each
    CHECK(bundle.report.ites.empty());
    CHECK(bundle.report.ege_treatment.systems + bundle.report.ege_control.systems == 30);

    const std::string json_text = render_report_json(bundle);
    CHECK(json_text.find("\"ites\"") == std::string::npos);
    const nlohmann::json parsed = nlohmann::json::parse(json_text);
    CHECK_FALSE(parsed.contains("ites"));
    CHECK(parsed["systems"].get<std::uint64_t>() == 30);
}

TEST_CASE("exhaustive design routes through the oracle") {
    std::string text = surface_config_text(0, "exhaustive", "sign_flip");
    text.insert(text.rfind('}'), R"(, "split_universe": {"seeds": [11, 12, 13]})");
    const ExperimentSpec spec = parse_experiment_config(text);
    const ExecutorRegistry registry = builtin_registry(spec.surface);

    const ReportBundle bundle = run_experiment(spec, registry);
    CHECK(bundle.report.ege_treatment.systems == 18); // 6 combos x 3 splits

    const DataPool pool = pool_from_source(spec.population.data_source, spec.master_seed);
    const SplitUniverse universe = SplitUniverse::from_seeds(
        pool.instances.size(), spec.population.split_policy, spec.universe_seeds);
    const MetricSpec metric{"surface_loss", MetricSpec::Orientation::lower_is_better};
    const double exact = exact_ate(spec.population, registry, universe, metric, pool, spec.budget);
    CHECK(bundle.report.ate == exact);
}

TEST_CASE("reports are byte-identical across runs and parallelism levels") {
    std::string text = surface_config_text(40, "paired");
    ExperimentSpec spec = parse_experiment_config(text);
    const ExecutorRegistry registry = builtin_registry(spec.surface);

    spec.parallelism = 1;
    const ReportBundle serial = run_experiment(spec, registry);
    spec.parallelism = 4;
    const ReportBundle threaded = run_experiment(spec, registry);
    const ReportBundle again = run_experiment(spec, registry);

    CHECK(render_report_json(serial) == render_report_json(threaded));
    CHECK(render_report_json(serial) == render_report_json(again));
    CHECK(render_runs_table(serial) == render_runs_table(threaded));
    CHECK(serial.report.spec_digest == threaded.report.spec_digest);
}

TEST_CASE("emit_report writes exactly the rendered bytes") {
    const fs::path dir = fresh_temp_dir("emit");
    const ExperimentSpec spec = parse_experiment_config(surface_config_text(6, "paired"));
    const ExecutorRegistry registry = builtin_registry(spec.surface);
    const ReportBundle bundle = run_experiment(spec, registry);

    OutputSpec output;
    output.report_path = (dir / "report.json").string();
    output.runs_table_path = (dir / "runs.csv").string();
    emit_report(bundle, output);

    CHECK(read_file(output.report_path) == render_report_json(bundle));
    CHECK(read_file(output.runs_table_path) == render_runs_table(bundle));
    fs::remove_all(dir);
}

TEST_CASE("runs table has the documented columns in order") {
    const ExperimentSpec spec = parse_experiment_config(surface_config_text(3, "paired"));
    const ReportBundle bundle = run_experiment(spec, builtin_registry(spec.surface));
    const std::string table = render_runs_table(bundle);
    const std::string header = table.substr(0, table.find('\n'));
    CHECK(header == "system_id,arm,method,context,scale,split_seed,N,M,mean_loss");

    std::size_t rows = 0;
    for (const char c : table) rows += c == '\n' ? 1 : 0;
    CHECK(rows == 1 + 6); // header + 2S
}

TEST_CASE("executor failures leave a partial manifest") {
    const fs::path dir = fresh_temp_dir("partial");
    ExperimentSpec spec = parse_experiment_config(surface_config_text(8, "paired"));
    spec.population.executor_id = "explosive";
    spec.has_output = true;
    spec.output.report_path = (dir / "report.json").string();
    spec.output.runs_table_path = (dir / "runs.csv").string();

    ExecutorRegistry registry = builtin_registry(spec.surface);
    registry.add("explosive", [&](const ArmedSystem& armed, const DataPool&,
                                  const MetricSpec&) -> ExecutionResult {
        if (armed.base.system_id == 3) throw ExecutorError("simulated failure");
        return {run_synthetic(armed, spec.surface), false};
    });

    CHECK_THROWS_AS(run_experiment(spec, registry), ExecutorError);
    const fs::path manifest = dir / "report.json.partial";
    REQUIRE(fs::exists(manifest));
    const std::string content = read_file(manifest);
    CHECK(content.find("simulated failure") != std::string::npos);
    CHECK(content.find("ok,") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("emitted reports validate against the shipped schema") {
    const nlohmann::json schema =
        nlohmann::json::parse(read_file(std::string(POPCOMP_DOCS_DIR) + "/report_schema.json"));
    const auto& fields = schema.at("fields");

    const auto type_matches = [](const nlohmann::json& value, const std::string& type) {
        if (type == "string") return value.is_string();
        if (type == "unsigned") return value.is_number_unsigned();
        if (type == "number") return value.is_number();
        if (type == "boolean") return value.is_boolean();
        if (type == "object") return value.is_object();
        if (type == "array_number") {
            if (!value.is_array()) return false;
            for (const auto& item : value) {
                if (!item.is_number()) return false;
            }
            return true;
        }
        return false;
    };

    const auto validate_report = [&](const nlohmann::json& report) {
        // Every documented mandatory field is present with the right type;
        // optional fields have the right type when present.
        for (const auto& item : fields.items()) {
            const std::string& path = item.key();
            const nlohmann::json& field = item.value();
            const nlohmann::json* node = &report;
            bool present = true;
            std::string remaining = path;
            std::string parent_optional;
            while (true) {
                const std::size_t dot = remaining.find('.');
                const std::string head = remaining.substr(0, dot);
                if (!node->contains(head)) {
                    present = false;
                    break;
                }
                node = &(*node)[head];
                if (dot == std::string::npos) break;
                remaining = remaining.substr(dot + 1);
            }
            const bool optional = field.value("optional", false) ||
                                  path.rfind("ites", 0) == 0 ||
                                  path.rfind("confidence_interval.", 0) == 0 ||
                                  path.rfind("test.", 0) == 0;
            if (!present) {
                if (!optional) FAIL("missing mandatory report field: ", path);
                continue;
            }
            CHECK_MESSAGE(type_matches(*node, field.at("type").get<std::string>()),
                          "field ", path, " has the wrong type");
        }
        // Every top-level key in the report is documented.
        for (const auto& item : report.items()) {
            const std::string& key = item.key();
            CHECK_MESSAGE(fields.contains(key), "undocumented report field: ", key);
        }
    };

    const ExperimentSpec paired = parse_experiment_config(surface_config_text(8, "paired"));
    validate_report(
        nlohmann::json::parse(render_report_json(run_experiment(paired, builtin_registry(paired.surface)))));

    const ExperimentSpec indep =
        parse_experiment_config(surface_config_text(24, "independent", "permutation"));
    validate_report(
        nlohmann::json::parse(render_report_json(run_experiment(indep, builtin_registry(indep.surface)))));
}

TEST_CASE("digest changes with the config content") {
    const ExperimentSpec a = parse_experiment_config(surface_config_text(8, "paired"));
    const ExperimentSpec b = parse_experiment_config(surface_config_text(9, "paired"));
    CHECK(a.digest != b.digest);
    const ExperimentSpec a_again = parse_experiment_config(surface_config_text(8, "paired"));
    CHECK(a.digest == a_again.digest);
}

TEST_CASE("broad-method contrasts run end to end") {
    const std::string text = R"({
  "master_seed": 515,
  "design": "paired",
  "systems": 40,
  "metric": {"id": "surface_loss"},
  "population": {
    "executor": "synthetic_surface",
    "contrast": {
      "kind": "broad",
      "treatment": {"name": "family_a", "components": [
        {"name": "a_objective", "values": ["lm", "mlm"]},
        {"name": "a_corpus", "values": ["small", "large", "web"]}
      ]},
      "control": {"name": "family_b", "components": [
        {"name": "b_weighting", "values": ["binary", "tfidf"]}
      ]}
    },
    "nuisance": [{"name": "context", "values": ["w", "x"]}],
    "data": {"kind": "index_pool", "size": 16},
    "split": {"train_fraction": 0.5}
  },
  "surface": {
    "base_loss": 0.4,
    "value_effects": [
      {"variable": "a_objective", "value": "lm", "effect": 0.06},
      {"variable": "a_corpus", "value": "web", "effect": -0.03},
      {"variable": "b_weighting", "value": "tfidf", "effect": 0.02}
    ],
    "split_noise_sd": 0.02
  },
  "inference": {"test": "sign_flip", "resamples": 4000, "alpha": 0.05}
})";
    const ExperimentSpec spec = parse_experiment_config(text);
    REQUIRE(validate_experiment(spec, builtin_registry(spec.surface)).valid());
    const ReportBundle bundle = run_experiment(spec, builtin_registry(spec.surface));

    CHECK(bundle.report.ege_treatment.method_label == "family_a");
    CHECK(bundle.report.ege_control.method_label == "family_b");
    CHECK(bundle.report.ites.size() == 40);
    CHECK(bundle.value_columns ==
          std::vector<std::string>{"a_objective", "a_corpus", "b_weighting", "context"});

    // Arms carry their own component combinations only.
    for (const auto& record : bundle.runs) {
        if (record.arm == Arm::treatment) {
            CHECK(record.full_values.count("a_objective") == 1);
            CHECK(record.full_values.count("b_weighting") == 0);
        } else {
            CHECK(record.full_values.count("b_weighting") == 1);
            CHECK(record.full_values.count("a_objective") == 0);
        }
    }

    // The sampled treatment arm averages over {lm: +0.06, mlm: 0} and
    // {web: -0.03, else 0}; with 40 systems the estimate stays within a
    // loose band of the population value 0.42 vs control 0.41.
    CHECK(std::abs(bundle.report.ate - 0.01) < 0.05);

    // Exhaustive route averages the broad expansions exactly.
    std::string exhaustive_text = text;
    const std::string from = "\"design\": \"paired\"";
    exhaustive_text.replace(exhaustive_text.find(from), from.size(),
                            "\"design\": \"exhaustive\"");
    exhaustive_text.insert(exhaustive_text.rfind('}'),
                           R"(, "split_universe": {"seeds": [3, 4]})");
    const ExperimentSpec exhaustive_spec = parse_experiment_config(exhaustive_text);
    const ReportBundle exact = run_experiment(exhaustive_spec, builtin_registry(exhaustive_spec.surface));
    CHECK(exact.report.ege_treatment.systems == 4); // 2 contexts x 2 splits
    CHECK(exact.runs.size() == 4 * (6 + 2));        // per system: 6 treatment + 2 control combos
    CHECK(std::abs(exact.report.ate - 0.01) <= 1e-12);
}
