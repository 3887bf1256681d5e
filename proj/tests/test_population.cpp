#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "popcomp/errors.hpp"
#include "popcomp/population.hpp"

using namespace popcomp;
using popcomp::testing::surface_population;
using popcomp::testing::text_population;

TEST_CASE("default weights are exactly uniform") {
    for (std::size_t n : {1u, 2u, 3u, 5u, 7u}) {
        std::vector<std::string> values;
        for (std::size_t i = 0; i < n; ++i) values.push_back("v" + std::to_string(i));
        const MethodVariable var("x", values);
        REQUIRE(var.weights.size() == n);
        for (const double w : var.weights) {
            CHECK(w == 1.0 / static_cast<double>(n));
        }
        double sum = 0.0;
        for (const double w : var.weights) sum += w;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("a consistent spec yields an empty report") {
    const ValidationReport report = validate_spec(surface_population());
    CHECK(report.valid());
    CHECK(report.violations.empty());
}

TEST_CASE("validate_spec is idempotent and pure") {
    const PopulationSpec spec = surface_population();
    const ValidationReport first = validate_spec(spec);
    const ValidationReport second = validate_spec(spec);
    REQUIRE(first.violations.size() == second.violations.size());
    for (std::size_t i = 0; i < first.violations.size(); ++i) {
        CHECK(first.violations[i].path == second.violations[i].path);
        CHECK(first.violations[i].message == second.violations[i].message);
    }
}

TEST_CASE("contrast value outside the variable domain is one named violation") {
    PopulationSpec spec = surface_population();
    spec.contrast.simple.variable = MethodVariable("method", {"b", "c"});
    spec.contrast.simple.treatment = "a"; // not in {b, c}
    spec.contrast.simple.control = "b";
    const ValidationReport report = validate_spec(spec);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].path == "contrast.treatment");
}

TEST_CASE("nuisance variable duplicating the treatment variable is flagged") {
    PopulationSpec spec = surface_population();
    spec.nuisance.push_back(MethodVariable("method", {"p", "q"}));
    const ValidationReport report = validate_spec(spec);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].message.find("method") != std::string::npos);
}

TEST_CASE("duplicate values, bad weights and empty domains are all reported") {
    PopulationSpec spec = surface_population();
    spec.nuisance[0].values = {"w", "w"};
    spec.nuisance[0].weights = {0.5, 0.5};
    spec.nuisance[1].weights = {0.9, 0.2}; // sums to 1.1
    CHECK(validate_spec(spec).violations.size() == 2);

    spec = surface_population();
    spec.nuisance[0] = MethodVariable("context", std::vector<std::string>{});
    CHECK_FALSE(validate_spec(spec).valid());

    spec = surface_population();
    spec.nuisance[0].weights = {-0.5, 1.0, 0.5};
    CHECK_FALSE(validate_spec(spec).valid());
}

TEST_CASE("contrast treatment equal to control is flagged") {
    PopulationSpec spec = surface_population();
    spec.contrast.simple.control = "a";
    CHECK_FALSE(validate_spec(spec).valid());
}

TEST_CASE("split policy must be resolvable against the pool") {
    PopulationSpec spec = surface_population(2, 0.5);
    CHECK(validate_spec(spec).valid());
    spec.split_policy.train_size = 5;
    spec.split_policy.test_size = 5; // 10 > pool of 2
    CHECK_FALSE(validate_spec(spec).valid());
}

TEST_CASE("satisfiable exclusions are validation errors, malformed ones too") {
    PopulationSpec spec = surface_population();
    spec.exclusions.push_back({{"context", "w"}, {"method", "a"}});
    ValidationReport report = validate_spec(spec);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].path == "exclusions[0]");
    CHECK(report.violations[0].message.find("reachable") != std::string::npos);

    spec.exclusions[0] = {{"nope", "w"}};
    report = validate_spec(spec);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].message.find("undeclared") != std::string::npos);

    spec.exclusions[0] = {{"context", "zz"}};
    report = validate_spec(spec);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].message.find("outside the domain") != std::string::npos);
}

TEST_CASE("nuisance_combination_count multiplies domain sizes") {
    PopulationSpec spec = surface_population();
    spec.nuisance = {MethodVariable("v2", {"C", "G", "H"}), MethodVariable("v3", {"D", "I"}),
                     MethodVariable("v4", {"F", "J", "Q", "U"})};
    CHECK(nuisance_combination_count(spec) == 24);

    spec.nuisance = {MethodVariable("v2", {"C"})};
    CHECK(nuisance_combination_count(spec) == 1);

    spec.nuisance = {};
    CHECK(nuisance_combination_count(spec) == 1); // empty product

    spec.nuisance = {MethodVariable("method", {"x", "y"})}; // collides with contrast
    CHECK_THROWS_AS(nuisance_combination_count(spec), ConfigError);
}

TEST_CASE("expand_broad_method enumerates the full cross-product") {
    BroadMethodSpec broad;
    broad.name = "pipeline_family";
    broad.components = {MethodVariable("c1", {"A", "B"}), MethodVariable("c2", {"C", "G", "H"})};
    const auto combos = expand_broad_method(broad);
    REQUIRE(combos.size() == 6);
    CHECK(combos.front().at("c1") == "A");
    CHECK(combos.front().at("c2") == "C");
    CHECK(combos.back().at("c1") == "B");
    CHECK(combos.back().at("c2") == "H");

    BroadMethodSpec singleton;
    singleton.name = "one";
    singleton.components = {MethodVariable("c", {"only"})};
    CHECK(expand_broad_method(singleton).size() == 1);
}

TEST_CASE("expansion order is lexicographic, first component slowest") {
    BroadMethodSpec broad;
    broad.name = "m";
    broad.components = {MethodVariable("a", {"1", "2"}), MethodVariable("b", {"1", "2"})};
    const auto combos = expand_broad_method(broad);
    REQUIRE(combos.size() == 4);
    const std::vector<std::pair<std::string, std::string>> expected = {
        {"1", "1"}, {"1", "2"}, {"2", "1"}, {"2", "2"}};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(combos[i].at("a") == expected[i].first);
        CHECK(combos[i].at("b") == expected[i].second);
    }
}

TEST_CASE("expansion length equals the product of component sizes") {
    for (std::size_t s1 : {1u, 2u, 3u}) {
        for (std::size_t s2 : {1u, 2u, 4u}) {
            BroadMethodSpec broad;
            broad.name = "m";
            std::vector<std::string> v1, v2;
            for (std::size_t i = 0; i < s1; ++i) v1.push_back("a" + std::to_string(i));
            for (std::size_t i = 0; i < s2; ++i) v2.push_back("b" + std::to_string(i));
            broad.components = {MethodVariable("c1", v1), MethodVariable("c2", v2)};
            CHECK(expand_broad_method(broad).size() == s1 * s2);
        }
    }
}

TEST_CASE("broad contrast scopes must not collide with nuisance variables") {
    PopulationSpec spec = surface_population();
    spec.contrast.kind = ContrastKind::broad;
    spec.contrast.broad_treatment.name = "family_a";
    spec.contrast.broad_treatment.components = {MethodVariable("context", {"1", "2"})};
    spec.contrast.broad_control.name = "family_b";
    spec.contrast.broad_control.components = {MethodVariable("other", {"1", "2"})};
    const ValidationReport report = validate_spec(spec);
    REQUIRE_FALSE(report.valid());
    bool found = false;
    for (const auto& violation : report.violations) {
        if (violation.message.find("context") != std::string::npos) found = true;
    }
    CHECK(found);
}

TEST_CASE("text tutorial population is valid") {
    CHECK(validate_spec(text_population()).valid());
    CHECK(validate_spec(text_population(true)).valid());
    PopulationSpec spec = text_population(true);
    CHECK(nuisance_combination_count(spec) == 24);
}
