#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "popcomp/data.hpp"
#include "popcomp/population.hpp"

namespace popcomp {

// From-scratch text classification pipeline: tokenize -> optional
// lowercasing -> n-gram features -> term weighting -> learner. Everything
// (vocabulary, document frequencies, learner parameters) is a function of
// the training split only.
struct TextPipelineConfig {
    enum class Weighting { binary, tf, tfidf };
    enum class Learner { naive_bayes, logistic_regression };

    bool lowercase = true;
    int ngram_order = 1; // 1 = unigrams; 2 = unigrams + bigrams
    Weighting weighting = Weighting::binary;
    Learner learner = Learner::naive_bayes;

    // Minimum training document frequency for a term to enter the
    // vocabulary.
    std::size_t min_df = 1;

    // Fixed training constants; epochs is overridable for tests.
    int epochs = 200;
    double learning_rate = 0.1;

    // Reads the pipeline variables from an armed system's values
    // (lowercasing, ngram_order, weighting, learner, optional min_df).
    // Throws ExecutorError on missing keys or unknown values.
    static TextPipelineConfig from_values(const ValueAssignment& values);
};

// Maximal runs of ASCII alphanumerics; everything else separates tokens.
std::vector<std::string> tokenize(std::string_view text, bool lowercase);

// Vocabulary and document-frequency statistics of the training split.
struct FeatureSpace {
    std::vector<std::string> terms;            // sorted, deterministic indexing
    std::map<std::string, std::size_t> index;
    std::vector<double> idf;                   // filled for tfidf weighting
    std::size_t n_train_docs = 0;
};

FeatureSpace build_feature_space(const TextPipelineConfig& config, std::span<const Instance> train);

// Sparse weighted feature vector, sorted by feature index. Terms outside
// the training vocabulary are dropped.
std::vector<std::pair<std::size_t, double>> featurize(const TextPipelineConfig& config,
                                                      const FeatureSpace& space,
                                                      std::string_view text);

// Trains the configured learner from scratch on the training documents
// and returns one predicted label per test document. Deterministic; the
// seed is reserved for stochastic learners and unused by the current two.
// Score ties resolve to the lowest class index; a test document with no
// known features is predicted from the prior/bias alone.
std::vector<std::string> run_text_pipeline(const TextPipelineConfig& config,
                                           const std::vector<Instance>& train,
                                           const std::vector<std::string>& test_texts,
                                           const std::vector<std::string>& class_set,
                                           std::uint64_t seed);

} // namespace popcomp
