#include "popcomp/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

#include "popcomp/errors.hpp"
#include "popcomp/numeric.hpp"

namespace popcomp {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ConfigError("config: " + path + ": " + message);
}

const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    return j;
}

// Unknown keys are fatal so misspelled settings can never be silently
// ignored.
void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& path) {
    const std::set<std::string> allowed_set(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (allowed_set.count(key) == 0) {
            fail(path.empty() ? key : path + "." + key, "unknown key '" + key + "'");
        }
    }
}

const json* find_key(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

const json& require_key(const json& obj, const char* key, const std::string& path) {
    const json* j = find_key(obj, key);
    if (j == nullptr) fail(path, "missing required key '" + std::string(key) + "'");
    return *j;
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::uint64_t get_u64(const json& j, const std::string& path) {
    if (!j.is_number_unsigned()) fail(path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

bool get_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected a boolean");
    return j.get<bool>();
}

MethodVariable parse_variable(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, {"name", "values", "weights"}, path);
    const std::string name = get_string(require_key(j, "name", path), path + ".name");

    const json& values_json = require_key(j, "values", path);
    if (!values_json.is_array()) fail(path + ".values", "expected an array");
    std::vector<std::string> values;
    for (std::size_t i = 0; i < values_json.size(); ++i) {
        values.push_back(get_string(values_json[i], path + ".values[" + std::to_string(i) + "]"));
    }

    if (const json* weights_json = find_key(j, "weights")) {
        if (!weights_json->is_array()) fail(path + ".weights", "expected an array");
        std::vector<double> weights;
        for (std::size_t i = 0; i < weights_json->size(); ++i) {
            weights.push_back(
                get_number((*weights_json)[i], path + ".weights[" + std::to_string(i) + "]"));
        }
        return MethodVariable(name, std::move(values), std::move(weights));
    }
    return MethodVariable(name, std::move(values));
}

BroadMethodSpec parse_broad(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, {"name", "components"}, path);
    BroadMethodSpec broad;
    broad.name = get_string(require_key(j, "name", path), path + ".name");
    const json& comps = require_key(j, "components", path);
    if (!comps.is_array()) fail(path + ".components", "expected an array");
    for (std::size_t i = 0; i < comps.size(); ++i) {
        broad.components.push_back(
            parse_variable(comps[i], path + ".components[" + std::to_string(i) + "]"));
    }
    return broad;
}

TreatmentContrast parse_contrast(const json& j, const std::string& path) {
    require_object(j, path);
    TreatmentContrast contrast;
    const std::string kind = get_string(require_key(j, "kind", path), path + ".kind");
    if (kind == "simple") {
        contrast.kind = ContrastKind::simple;
        reject_unknown(j, {"kind", "variable", "values", "treatment", "control"}, path);
        const std::string name = get_string(require_key(j, "variable", path), path + ".variable");
        contrast.simple.treatment =
            get_string(require_key(j, "treatment", path), path + ".treatment");
        contrast.simple.control = get_string(require_key(j, "control", path), path + ".control");
        std::vector<std::string> values;
        if (const json* values_json = find_key(j, "values")) {
            if (!values_json->is_array()) fail(path + ".values", "expected an array");
            for (std::size_t i = 0; i < values_json->size(); ++i) {
                values.push_back(
                    get_string((*values_json)[i], path + ".values[" + std::to_string(i) + "]"));
            }
        } else {
            values = {contrast.simple.treatment, contrast.simple.control};
        }
        contrast.simple.variable = MethodVariable(name, std::move(values));
    } else if (kind == "broad") {
        contrast.kind = ContrastKind::broad;
        reject_unknown(j, {"kind", "treatment", "control"}, path);
        contrast.broad_treatment = parse_broad(require_key(j, "treatment", path), path + ".treatment");
        contrast.broad_control = parse_broad(require_key(j, "control", path), path + ".control");
    } else {
        fail(path + ".kind", "expected 'simple' or 'broad'");
    }
    return contrast;
}

DataSource parse_data(const json& j, const std::string& path) {
    require_object(j, path);
    DataSource source;
    const std::string kind = get_string(require_key(j, "kind", path), path + ".kind");
    if (kind == "synthetic_corpus") {
        source.kind = DataSource::Kind::synthetic_corpus;
        reject_unknown(j, {"kind", "n_docs", "vocab_size", "class_signal_strength", "doc_length"},
                       path);
        source.n_docs = get_u64(require_key(j, "n_docs", path), path + ".n_docs");
        source.vocab_size = get_u64(require_key(j, "vocab_size", path), path + ".vocab_size");
        source.class_signal_strength = get_number(
            require_key(j, "class_signal_strength", path), path + ".class_signal_strength");
        source.doc_length = get_u64(require_key(j, "doc_length", path), path + ".doc_length");
    } else if (kind == "index_pool") {
        source.kind = DataSource::Kind::index_pool;
        reject_unknown(j, {"kind", "size"}, path);
        source.pool_size = get_u64(require_key(j, "size", path), path + ".size");
    } else if (kind == "inline") {
        source.kind = DataSource::Kind::inline_pool;
        reject_unknown(j, {"kind", "classes", "instances"}, path);
        const json& classes = require_key(j, "classes", path);
        if (!classes.is_array()) fail(path + ".classes", "expected an array");
        for (std::size_t i = 0; i < classes.size(); ++i) {
            source.classes.push_back(
                get_string(classes[i], path + ".classes[" + std::to_string(i) + "]"));
        }
        const json& instances = require_key(j, "instances", path);
        if (!instances.is_array()) fail(path + ".instances", "expected an array");
        for (std::size_t i = 0; i < instances.size(); ++i) {
            const std::string ipath = path + ".instances[" + std::to_string(i) + "]";
            require_object(instances[i], ipath);
            reject_unknown(instances[i], {"text", "label"}, ipath);
            source.instances.emplace_back(
                get_string(require_key(instances[i], "text", ipath), ipath + ".text"),
                get_string(require_key(instances[i], "label", ipath), ipath + ".label"));
        }
    } else {
        fail(path + ".kind", "expected 'synthetic_corpus', 'index_pool' or 'inline'");
    }
    return source;
}

SplitPolicy parse_split(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, {"train_fraction", "train_size", "test_size"}, path);
    SplitPolicy policy;
    if (const json* fraction = find_key(j, "train_fraction")) {
        policy.train_fraction = get_number(*fraction, path + ".train_fraction");
    }
    if (const json* train_size = find_key(j, "train_size")) {
        policy.train_size = get_u64(*train_size, path + ".train_size");
    }
    if (const json* test_size = find_key(j, "test_size")) {
        policy.test_size = get_u64(*test_size, path + ".test_size");
    }
    if (!policy.train_size && !policy.test_size && find_key(j, "train_fraction") == nullptr) {
        fail(path, "split needs train_fraction or absolute sizes");
    }
    return policy;
}

PopulationSpec parse_population(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, {"executor", "contrast", "nuisance", "data", "split", "exclusions"}, path);
    PopulationSpec population;
    population.executor_id = get_string(require_key(j, "executor", path), path + ".executor");
    population.contrast = parse_contrast(require_key(j, "contrast", path), path + ".contrast");
    if (const json* nuisance = find_key(j, "nuisance")) {
        if (!nuisance->is_array()) fail(path + ".nuisance", "expected an array");
        for (std::size_t i = 0; i < nuisance->size(); ++i) {
            population.nuisance.push_back(
                parse_variable((*nuisance)[i], path + ".nuisance[" + std::to_string(i) + "]"));
        }
    }
    population.data_source = parse_data(require_key(j, "data", path), path + ".data");
    population.split_policy = parse_split(require_key(j, "split", path), path + ".split");
    if (const json* exclusions = find_key(j, "exclusions")) {
        if (!exclusions->is_array()) fail(path + ".exclusions", "expected an array");
        for (std::size_t i = 0; i < exclusions->size(); ++i) {
            const std::string epath = path + ".exclusions[" + std::to_string(i) + "]";
            require_object((*exclusions)[i], epath);
            ValueAssignment assignment;
            for (const auto& [key, value] : (*exclusions)[i].items()) {
                assignment[key] = get_string(value, epath + "." + key);
            }
            population.exclusions.push_back(std::move(assignment));
        }
    }
    return population;
}

MetricSpec parse_metric(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, {"id", "orientation"}, path);
    MetricSpec metric;
    metric.metric_id = get_string(require_key(j, "id", path), path + ".id");
    if (metric.metric_id != "zero_one_error" && metric.metric_id != "zero_one_agreement" &&
        metric.metric_id != "surface_loss") {
        fail(path + ".id", "unknown metric '" + metric.metric_id + "'");
    }
    const bool agreement = metric.metric_id == "zero_one_agreement";
    metric.orientation = agreement ? MetricSpec::Orientation::higher_is_better
                                   : MetricSpec::Orientation::lower_is_better;
    if (const json* orientation = find_key(j, "orientation")) {
        const std::string value = get_string(*orientation, path + ".orientation");
        if (value == "lower_is_better") {
            metric.orientation = MetricSpec::Orientation::lower_is_better;
        } else if (value == "higher_is_better") {
            metric.orientation = MetricSpec::Orientation::higher_is_better;
        } else {
            fail(path + ".orientation", "expected 'lower_is_better' or 'higher_is_better'");
        }
        const bool consistent = agreement
                                    ? metric.orientation == MetricSpec::Orientation::higher_is_better
                                    : metric.orientation == MetricSpec::Orientation::lower_is_better;
        if (!consistent) {
            fail(path + ".orientation", "orientation contradicts metric '" + metric.metric_id + "'");
        }
    }
    return metric;
}

InferenceSpec parse_inference(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, {"test", "resamples", "alpha", "sidedness"}, path);
    InferenceSpec inference;
    inference.test = get_string(require_key(j, "test", path), path + ".test");
    if (inference.test != "none" && inference.test != "sign_flip" &&
        inference.test != "system_bootstrap" && inference.test != "permutation") {
        fail(path + ".test", "unknown test '" + inference.test + "'");
    }
    if (const json* resamples = find_key(j, "resamples")) {
        inference.resamples = get_u64(*resamples, path + ".resamples");
    }
    if (const json* alpha = find_key(j, "alpha")) {
        inference.alpha = get_number(*alpha, path + ".alpha");
        if (!(inference.alpha > 0.0 && inference.alpha < 1.0)) {
            fail(path + ".alpha", "alpha must lie in (0,1)");
        }
    }
    if (const json* sidedness = find_key(j, "sidedness")) {
        const std::string value = get_string(*sidedness, path + ".sidedness");
        if (value == "one_sided") {
            inference.sidedness = Sidedness::one_sided_greater;
        } else if (value == "two_sided") {
            inference.sidedness = Sidedness::two_sided;
        } else {
            fail(path + ".sidedness", "expected 'one_sided' or 'two_sided'");
        }
    }
    return inference;
}

IntervalSpec parse_interval(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, {"method", "level", "resamples"}, path);
    IntervalSpec interval;
    interval.enabled = true;
    const std::string method = get_string(require_key(j, "method", path), path + ".method");
    if (method == "normal") {
        interval.method = IntervalMethod::normal;
    } else if (method == "bootstrap_over_systems") {
        interval.method = IntervalMethod::bootstrap_over_systems;
    } else {
        fail(path + ".method", "expected 'normal' or 'bootstrap_over_systems'");
    }
    if (const json* level = find_key(j, "level")) {
        interval.level = get_number(*level, path + ".level");
        if (!(interval.level > 0.0 && interval.level < 1.0)) {
            fail(path + ".level", "level must lie in (0,1)");
        }
    }
    if (const json* resamples = find_key(j, "resamples")) {
        interval.resamples = get_u64(*resamples, path + ".resamples");
    }
    return interval;
}

SyntheticSurfaceParams parse_surface(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j,
                   {"base_loss", "treatment_effect", "split_noise_sd", "instance_noise_sd",
                    "clip_to_unit", "value_effects", "interaction_effects"},
                   path);
    SyntheticSurfaceParams surface;
    if (const json* v = find_key(j, "base_loss")) surface.base_loss = get_number(*v, path + ".base_loss");
    if (const json* v = find_key(j, "treatment_effect")) {
        surface.treatment_effect = get_number(*v, path + ".treatment_effect");
    }
    if (const json* v = find_key(j, "split_noise_sd")) {
        surface.split_noise_sd = get_number(*v, path + ".split_noise_sd");
    }
    if (const json* v = find_key(j, "instance_noise_sd")) {
        surface.instance_noise_sd = get_number(*v, path + ".instance_noise_sd");
    }
    if (const json* v = find_key(j, "clip_to_unit")) {
        surface.clip_to_unit = get_bool(*v, path + ".clip_to_unit");
    }
    if (const json* effects = find_key(j, "value_effects")) {
        if (!effects->is_array()) fail(path + ".value_effects", "expected an array");
        for (std::size_t i = 0; i < effects->size(); ++i) {
            const std::string epath = path + ".value_effects[" + std::to_string(i) + "]";
            require_object((*effects)[i], epath);
            reject_unknown((*effects)[i], {"variable", "value", "effect"}, epath);
            ValueEffect effect;
            effect.variable = get_string(require_key((*effects)[i], "variable", epath), epath + ".variable");
            effect.value = get_string(require_key((*effects)[i], "value", epath), epath + ".value");
            effect.effect = get_number(require_key((*effects)[i], "effect", epath), epath + ".effect");
            surface.value_effects.push_back(std::move(effect));
        }
    }
    if (const json* effects = find_key(j, "interaction_effects")) {
        if (!effects->is_array()) fail(path + ".interaction_effects", "expected an array");
        for (std::size_t i = 0; i < effects->size(); ++i) {
            const std::string epath = path + ".interaction_effects[" + std::to_string(i) + "]";
            require_object((*effects)[i], epath);
            reject_unknown((*effects)[i], {"variable_a", "value_a", "variable_b", "value_b", "effect"},
                           epath);
            InteractionEffect effect;
            effect.variable_a =
                get_string(require_key((*effects)[i], "variable_a", epath), epath + ".variable_a");
            effect.value_a = get_string(require_key((*effects)[i], "value_a", epath), epath + ".value_a");
            effect.variable_b =
                get_string(require_key((*effects)[i], "variable_b", epath), epath + ".variable_b");
            effect.value_b = get_string(require_key((*effects)[i], "value_b", epath), epath + ".value_b");
            effect.effect = get_number(require_key((*effects)[i], "effect", epath), epath + ".effect");
            surface.interaction_effects.push_back(std::move(effect));
        }
    }
    return surface;
}

} // namespace

ExperimentSpec parse_experiment_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    require_object(j, "");
    reject_unknown(j,
                   {"master_seed", "design", "systems", "metric", "population", "inference",
                    "interval", "surface", "split_universe", "budget", "output", "parallelism"},
                   "");

    ExperimentSpec spec;

    // Seeds are mandatory and never auto-generated.
    spec.master_seed = get_u64(require_key(j, "master_seed", "master_seed"), "master_seed");

    const std::string design = get_string(require_key(j, "design", "design"), "design");
    if (design == "paired") spec.design = Design::paired;
    else if (design == "independent") spec.design = Design::independent;
    else if (design == "exhaustive") spec.design = Design::exhaustive;
    else fail("design", "expected 'paired', 'independent' or 'exhaustive'");

    if (const json* systems = find_key(j, "systems")) {
        const std::uint64_t s = get_u64(*systems, "systems");
        if (s > 1000000) fail("systems", "sample size too large");
        spec.systems = static_cast<int>(s);
    }

    spec.metric = parse_metric(require_key(j, "metric", "metric"), "metric");
    spec.population = parse_population(require_key(j, "population", "population"), "population");

    if (const json* inference = find_key(j, "inference")) {
        spec.inference = parse_inference(*inference, "inference");
    }
    if (const json* interval = find_key(j, "interval")) {
        spec.interval = parse_interval(*interval, "interval");
    }
    if (const json* surface = find_key(j, "surface")) {
        spec.surface = parse_surface(*surface, "surface");
    }
    if (const json* universe = find_key(j, "split_universe")) {
        require_object(*universe, "split_universe");
        reject_unknown(*universe, {"seeds"}, "split_universe");
        const json& seeds = require_key(*universe, "seeds", "split_universe");
        if (!seeds.is_array() || seeds.empty()) {
            fail("split_universe.seeds", "expected a non-empty array");
        }
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            spec.universe_seeds.push_back(
                get_u64(seeds[i], "split_universe.seeds[" + std::to_string(i) + "]"));
        }
    }
    if (const json* budget = find_key(j, "budget")) {
        spec.budget = get_u64(*budget, "budget");
        if (spec.budget < 1) fail("budget", "budget must be >= 1");
    }
    if (const json* output = find_key(j, "output")) {
        require_object(*output, "output");
        reject_unknown(*output, {"report", "runs_table"}, "output");
        spec.output.report_path = get_string(require_key(*output, "report", "output"), "output.report");
        spec.output.runs_table_path =
            get_string(require_key(*output, "runs_table", "output"), "output.runs_table");
        spec.has_output = true;
    }
    if (const json* parallelism = find_key(j, "parallelism")) {
        const std::uint64_t p = get_u64(*parallelism, "parallelism");
        if (p < 1 || p > 1024) fail("parallelism", "parallelism must lie in [1,1024]");
        spec.parallelism = static_cast<int>(p);
    }

    // Canonical echo (nlohmann objects iterate sorted by key) and digest.
    spec.echo_json = j.dump();
    spec.digest = "fnv1a64:" + to_hex(fnv1a64(spec.echo_json));
    return spec;
}

ExperimentSpec load_experiment_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_experiment_config(buffer.str());
}

ValidationReport validate_experiment(const ExperimentSpec& spec, const ExecutorRegistry& registry) {
    ValidationReport report = validate_spec(spec.population);

    if (spec.design != Design::exhaustive && spec.systems < 2) {
        report.violations.push_back(
            {"systems", "sampled designs need at least 2 systems, got " +
                            std::to_string(spec.systems)});
    }
    if (spec.design == Design::exhaustive && spec.universe_seeds.empty()) {
        report.violations.push_back(
            {"split_universe", "exhaustive designs require split_universe.seeds"});
    }

    if (!registry.contains(spec.population.executor_id)) {
        report.violations.push_back(
            {"population.executor", "executor '" + spec.population.executor_id + "' is not registered"});
    }

    // Metric/executor compatibility.
    if (spec.population.executor_id == "text_pipeline" && spec.metric.metric_id == "surface_loss") {
        report.violations.push_back(
            {"metric.id", "the text pipeline produces zero-one metrics, not surface_loss"});
    }
    if (spec.population.executor_id == "synthetic_surface" &&
        spec.metric.metric_id != "surface_loss") {
        report.violations.push_back(
            {"metric.id", "the synthetic surface produces surface_loss, not zero-one metrics"});
    }

    // Design/test compatibility.
    const std::string& test = spec.inference.test;
    if (spec.design == Design::independent) {
        if (test != "none" && test != "permutation") {
            report.violations.push_back(
                {"inference.test", "independent designs support 'permutation' (got '" + test + "')"});
        }
    } else {
        if (test != "none" && test != "sign_flip" && test != "system_bootstrap") {
            report.violations.push_back(
                {"inference.test",
                 "paired/exhaustive designs support 'sign_flip' or 'system_bootstrap' (got '" +
                     test + "')"});
        }
    }

    return report;
}

} // namespace popcomp
