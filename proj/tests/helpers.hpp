#pragma once

// Shared builders for test populations.

#include <string>
#include <vector>

#include "popcomp/population.hpp"
#include "popcomp/surface.hpp"

namespace popcomp::testing {

// Simple contrast on a synthetic-surface population:
// method in {a, b}, nuisance context in {w, x, y}, scale in {p, q}.
inline PopulationSpec surface_population(std::size_t pool_size = 20, double train_fraction = 0.5) {
    PopulationSpec spec;
    spec.contrast.kind = ContrastKind::simple;
    spec.contrast.simple.variable = MethodVariable("method", {"a", "b"});
    spec.contrast.simple.treatment = "a";
    spec.contrast.simple.control = "b";
    spec.nuisance = {MethodVariable("context", {"w", "x", "y"}),
                     MethodVariable("scale", {"p", "q"})};
    spec.data_source.kind = DataSource::Kind::index_pool;
    spec.data_source.pool_size = pool_size;
    spec.split_policy.train_fraction = train_fraction;
    spec.executor_id = "synthetic_surface";
    return spec;
}

// Text-pipeline population: contrast on the learner, nuisance over the
// preprocessing/weighting variables.
inline PopulationSpec text_population(bool with_min_df = false) {
    PopulationSpec spec;
    spec.contrast.kind = ContrastKind::simple;
    spec.contrast.simple.variable =
        MethodVariable("learner", {"naive_bayes", "logistic_regression"});
    spec.contrast.simple.treatment = "naive_bayes";
    spec.contrast.simple.control = "logistic_regression";
    spec.nuisance = {MethodVariable("lowercasing", {"yes", "no"}),
                     MethodVariable("ngram_order", {"1", "2"}),
                     MethodVariable("weighting", {"binary", "tf", "tfidf"})};
    if (with_min_df) {
        spec.nuisance.push_back(MethodVariable("min_df", {"1", "2"}));
    }
    spec.data_source.kind = DataSource::Kind::synthetic_corpus;
    spec.data_source.n_docs = 40;
    spec.data_source.vocab_size = 120;
    spec.data_source.class_signal_strength = 0.9;
    spec.data_source.doc_length = 12;
    spec.split_policy.train_fraction = 0.8;
    spec.executor_id = "text_pipeline";
    return spec;
}

} // namespace popcomp::testing
