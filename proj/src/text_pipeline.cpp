#include "popcomp/text_pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "popcomp/errors.hpp"

namespace popcomp {

namespace {

const std::string& require_value(const ValueAssignment& values, const std::string& key) {
    const auto it = values.find(key);
    if (it == values.end()) {
        throw ExecutorError("text_pipeline: configuration is missing variable '" + key + "'");
    }
    return it->second;
}

[[noreturn]] void unknown_value(const std::string& key, const std::string& value) {
    throw ExecutorError("text_pipeline: unknown value '" + value + "' for variable '" + key + "'");
}

} // namespace

TextPipelineConfig TextPipelineConfig::from_values(const ValueAssignment& values) {
    TextPipelineConfig config;

    const std::string& lowercasing = require_value(values, "lowercasing");
    if (lowercasing == "yes") config.lowercase = true;
    else if (lowercasing == "no") config.lowercase = false;
    else unknown_value("lowercasing", lowercasing);

    const std::string& ngram = require_value(values, "ngram_order");
    if (ngram == "1") config.ngram_order = 1;
    else if (ngram == "2") config.ngram_order = 2;
    else unknown_value("ngram_order", ngram);

    const std::string& weighting = require_value(values, "weighting");
    if (weighting == "binary") config.weighting = Weighting::binary;
    else if (weighting == "tf") config.weighting = Weighting::tf;
    else if (weighting == "tfidf") config.weighting = Weighting::tfidf;
    else unknown_value("weighting", weighting);

    const std::string& learner = require_value(values, "learner");
    if (learner == "naive_bayes") config.learner = Learner::naive_bayes;
    else if (learner == "logistic_regression") config.learner = Learner::logistic_regression;
    else unknown_value("learner", learner);

    if (const auto it = values.find("min_df"); it != values.end()) {
        if (it->second == "1") config.min_df = 1;
        else if (it->second == "2") config.min_df = 2;
        else unknown_value("min_df", it->second);
    }

    return config;
}

std::vector<std::string> tokenize(std::string_view text, bool lowercase) {
    std::vector<std::string> tokens;
    std::string current;
    for (const char ch : text) {
        const auto uc = static_cast<unsigned char>(ch);
        if (std::isalnum(uc)) {
            current += lowercase ? static_cast<char>(std::tolower(uc)) : ch;
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

namespace {

// Unigrams, plus space-joined bigrams when order is 2. Tokens never
// contain spaces, so the two never collide.
std::vector<std::string> ngrams(const std::vector<std::string>& tokens, int order) {
    std::vector<std::string> grams = tokens;
    if (order >= 2) {
        for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
            grams.push_back(tokens[i] + ' ' + tokens[i + 1]);
        }
    }
    return grams;
}

std::map<std::string, double> term_counts(const TextPipelineConfig& config, std::string_view text) {
    std::map<std::string, double> counts;
    for (auto& gram : ngrams(tokenize(text, config.lowercase), config.ngram_order)) {
        counts[gram] += 1.0;
    }
    return counts;
}

} // namespace

FeatureSpace build_feature_space(const TextPipelineConfig& config, std::span<const Instance> train) {
    std::map<std::string, std::size_t> doc_frequency;
    for (const auto& doc : train) {
        std::set<std::string> seen;
        for (auto& gram : ngrams(tokenize(doc.text, config.lowercase), config.ngram_order)) {
            seen.insert(std::move(gram));
        }
        for (const auto& gram : seen) doc_frequency[gram] += 1;
    }

    FeatureSpace space;
    space.n_train_docs = train.size();
    for (const auto& [term, df] : doc_frequency) {
        if (df >= config.min_df) space.terms.push_back(term);
    }
    // std::map iteration is already sorted, so indices are deterministic.
    for (std::size_t i = 0; i < space.terms.size(); ++i) {
        space.index[space.terms[i]] = i;
    }
    if (config.weighting == TextPipelineConfig::Weighting::tfidf) {
        space.idf.resize(space.terms.size());
        const double n = static_cast<double>(train.size());
        for (std::size_t i = 0; i < space.terms.size(); ++i) {
            const double df = static_cast<double>(doc_frequency.at(space.terms[i]));
            space.idf[i] = std::log((1.0 + n) / (1.0 + df)) + 1.0;
        }
    }
    return space;
}

std::vector<std::pair<std::size_t, double>> featurize(const TextPipelineConfig& config,
                                                      const FeatureSpace& space,
                                                      std::string_view text) {
    std::vector<std::pair<std::size_t, double>> features;
    for (const auto& [term, count] : term_counts(config, text)) {
        const auto it = space.index.find(term);
        if (it == space.index.end()) continue;
        double weight = 0.0;
        switch (config.weighting) {
            case TextPipelineConfig::Weighting::binary: weight = 1.0; break;
            case TextPipelineConfig::Weighting::tf: weight = count; break;
            case TextPipelineConfig::Weighting::tfidf: weight = count * space.idf[it->second]; break;
        }
        features.emplace_back(it->second, weight);
    }
    // term_counts iterates a sorted map, so features arrive index-sorted
    // already; keep the sort as a guarantee, it is nearly free on sorted
    // input.
    std::sort(features.begin(), features.end());
    return features;
}

namespace {

using SparseVec = std::vector<std::pair<std::size_t, double>>;

std::size_t argmax_lowest_tie(const std::vector<double>& scores) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c) {
        if (scores[c] > scores[best]) best = c;
    }
    return best;
}

// Multinomial naive Bayes with add-one smoothing on both the class
// priors and the per-class term masses; operates on the weighted counts.
std::vector<std::size_t> naive_bayes_predict(const std::vector<SparseVec>& train_x,
                                             const std::vector<std::size_t>& train_y,
                                             const std::vector<SparseVec>& test_x,
                                             std::size_t n_classes, std::size_t n_features) {
    std::vector<double> class_docs(n_classes, 0.0);
    std::vector<std::vector<double>> term_mass(n_classes, std::vector<double>(n_features, 0.0));
    std::vector<double> total_mass(n_classes, 0.0);

    for (std::size_t d = 0; d < train_x.size(); ++d) {
        const std::size_t c = train_y[d];
        class_docs[c] += 1.0;
        for (const auto& [f, x] : train_x[d]) {
            term_mass[c][f] += x;
            total_mass[c] += x;
        }
    }

    std::vector<double> log_prior(n_classes);
    const double n_train = static_cast<double>(train_x.size());
    for (std::size_t c = 0; c < n_classes; ++c) {
        log_prior[c] = std::log((class_docs[c] + 1.0) / (n_train + static_cast<double>(n_classes)));
    }

    std::vector<std::vector<double>> log_theta(n_classes, std::vector<double>(n_features, 0.0));
    for (std::size_t c = 0; c < n_classes; ++c) {
        const double denom = total_mass[c] + static_cast<double>(n_features);
        for (std::size_t f = 0; f < n_features; ++f) {
            log_theta[c][f] = std::log((term_mass[c][f] + 1.0) / denom);
        }
    }

    std::vector<std::size_t> predictions(test_x.size());
    std::vector<double> scores(n_classes);
    for (std::size_t d = 0; d < test_x.size(); ++d) {
        for (std::size_t c = 0; c < n_classes; ++c) {
            double score = log_prior[c];
            for (const auto& [f, x] : test_x[d]) score += x * log_theta[c][f];
            scores[c] = score;
        }
        predictions[d] = argmax_lowest_tie(scores);
    }
    return predictions;
}

// Multinomial logistic regression: full-batch gradient descent on the
// mean cross-entropy, fixed epoch count, zero initialization.
std::vector<std::size_t> logistic_regression_predict(const std::vector<SparseVec>& train_x,
                                                     const std::vector<std::size_t>& train_y,
                                                     const std::vector<SparseVec>& test_x,
                                                     std::size_t n_classes, std::size_t n_features,
                                                     int epochs, double learning_rate) {
    std::vector<std::vector<double>> weights(n_classes, std::vector<double>(n_features, 0.0));
    std::vector<double> bias(n_classes, 0.0);

    const double n_train = static_cast<double>(train_x.size());
    std::vector<double> scores(n_classes), probs(n_classes);
    std::vector<std::vector<double>> grad_w(n_classes, std::vector<double>(n_features, 0.0));
    std::vector<double> grad_b(n_classes, 0.0);

    auto softmax_scores = [&](const SparseVec& x) {
        for (std::size_t c = 0; c < n_classes; ++c) {
            double s = bias[c];
            for (const auto& [f, v] : x) s += v * weights[c][f];
            scores[c] = s;
        }
        const double top = *std::max_element(scores.begin(), scores.end());
        double z = 0.0;
        for (std::size_t c = 0; c < n_classes; ++c) {
            probs[c] = std::exp(scores[c] - top);
            z += probs[c];
        }
        for (std::size_t c = 0; c < n_classes; ++c) probs[c] /= z;
    };

    for (int epoch = 0; epoch < epochs; ++epoch) {
        for (auto& row : grad_w) std::fill(row.begin(), row.end(), 0.0);
        std::fill(grad_b.begin(), grad_b.end(), 0.0);

        for (std::size_t d = 0; d < train_x.size(); ++d) {
            softmax_scores(train_x[d]);
            for (std::size_t c = 0; c < n_classes; ++c) {
                const double err = probs[c] - (train_y[d] == c ? 1.0 : 0.0);
                grad_b[c] += err;
                for (const auto& [f, v] : train_x[d]) grad_w[c][f] += err * v;
            }
        }

        const double step = learning_rate / n_train;
        for (std::size_t c = 0; c < n_classes; ++c) {
            bias[c] -= step * grad_b[c];
            for (std::size_t f = 0; f < n_features; ++f) weights[c][f] -= step * grad_w[c][f];
        }
    }

    std::vector<std::size_t> predictions(test_x.size());
    for (std::size_t d = 0; d < test_x.size(); ++d) {
        for (std::size_t c = 0; c < n_classes; ++c) {
            double s = bias[c];
            for (const auto& [f, v] : test_x[d]) s += v * weights[c][f];
            scores[c] = s;
        }
        predictions[d] = argmax_lowest_tie(scores);
    }
    return predictions;
}

} // namespace

std::vector<std::string> run_text_pipeline(const TextPipelineConfig& config,
                                           const std::vector<Instance>& train,
                                           const std::vector<std::string>& test_texts,
                                           const std::vector<std::string>& class_set,
                                           std::uint64_t seed) {
    (void)seed;
    if (train.empty()) throw ExecutorError("text_pipeline: empty training set");
    if (class_set.empty()) throw ExecutorError("text_pipeline: empty class set");

    std::map<std::string, std::size_t> class_index;
    for (std::size_t c = 0; c < class_set.size(); ++c) class_index[class_set[c]] = c;

    std::vector<std::size_t> train_y;
    train_y.reserve(train.size());
    for (const auto& doc : train) {
        const auto it = class_index.find(doc.label);
        if (it == class_index.end()) {
            throw ExecutorError("text_pipeline: training label '" + doc.label +
                                "' is not in the class set");
        }
        train_y.push_back(it->second);
    }

    const FeatureSpace space = build_feature_space(config, train);
    std::vector<SparseVec> train_x(train.size());
    for (std::size_t d = 0; d < train.size(); ++d) {
        train_x[d] = featurize(config, space, train[d].text);
    }
    std::vector<SparseVec> test_x(test_texts.size());
    for (std::size_t d = 0; d < test_texts.size(); ++d) {
        test_x[d] = featurize(config, space, test_texts[d]);
    }

    std::vector<std::size_t> predicted;
    switch (config.learner) {
        case TextPipelineConfig::Learner::naive_bayes:
            predicted = naive_bayes_predict(train_x, train_y, test_x, class_set.size(),
                                            space.terms.size());
            break;
        case TextPipelineConfig::Learner::logistic_regression:
            predicted = logistic_regression_predict(train_x, train_y, test_x, class_set.size(),
                                                    space.terms.size(), config.epochs,
                                                    config.learning_rate);
            break;
    }

    std::vector<std::string> labels(predicted.size());
    for (std::size_t d = 0; d < predicted.size(); ++d) labels[d] = class_set[predicted[d]];
    return labels;
}

} // namespace popcomp
