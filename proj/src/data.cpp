#include "popcomp/data.hpp"

#include <cstdio>

#include "popcomp/errors.hpp"
#include "popcomp/rng.hpp"

namespace popcomp {

namespace {

std::string token_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "w%03zu", i);
    return std::string(buf);
}

} // namespace

DataPool generate_synthetic_corpus(std::size_t n_docs, std::size_t vocab_size,
                                   double class_signal_strength, std::size_t doc_length,
                                   std::uint64_t seed) {
    if (n_docs < 2) throw ContractError("synthetic corpus: n_docs must be >= 2");
    if (vocab_size < 2) throw ContractError("synthetic corpus: vocab_size must be >= 2");
    if (doc_length < 1) throw ContractError("synthetic corpus: doc_length must be >= 1");
    if (!(class_signal_strength >= 0.0 && class_signal_strength <= 1.0)) {
        throw ContractError("synthetic corpus: class_signal_strength must lie in [0,1]");
    }

    std::vector<std::string> vocab(vocab_size);
    for (std::size_t i = 0; i < vocab_size; ++i) vocab[i] = token_name(i);
    const std::size_t half = vocab_size / 2;

    DataPool pool;
    pool.class_set = {"neg", "pos"};
    pool.instances.reserve(n_docs);

    for (std::size_t doc = 0; doc < n_docs; ++doc) {
        const std::size_t cls = doc % 2; // alternating, so the pool is balanced
        Rng rng(derive_seed(seed, {std::string("doc"), static_cast<std::uint64_t>(doc)}));
        std::string text;
        for (std::size_t t = 0; t < doc_length; ++t) {
            std::size_t pick;
            if (rng.next_double() < class_signal_strength) {
                // Class-specific half (second half may be the larger one
                // when vocab_size is odd).
                if (cls == 0) {
                    pick = static_cast<std::size_t>(rng.next_below(half));
                } else {
                    pick = half + static_cast<std::size_t>(rng.next_below(vocab_size - half));
                }
            } else {
                pick = static_cast<std::size_t>(rng.next_below(vocab_size));
            }
            if (t != 0) text += ' ';
            text += vocab[pick];
        }
        pool.instances.push_back({std::move(text), pool.class_set[cls]});
    }
    return pool;
}

DataPool make_index_pool(std::size_t size) {
    if (size < 2) throw ContractError("index pool: size must be >= 2");
    DataPool pool;
    pool.class_set = {"neg", "pos"};
    pool.instances.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        pool.instances.push_back({std::to_string(i), pool.class_set[i % 2]});
    }
    return pool;
}

DataPool pool_from_source(const DataSource& source, std::uint64_t master_seed) {
    switch (source.kind) {
        case DataSource::Kind::synthetic_corpus:
            return generate_synthetic_corpus(source.n_docs, source.vocab_size,
                                             source.class_signal_strength, source.doc_length,
                                             derive_seed(master_seed, {std::string("corpus")}));
        case DataSource::Kind::index_pool:
            return make_index_pool(source.pool_size);
        case DataSource::Kind::inline_pool: {
            DataPool pool;
            pool.class_set = source.classes;
            pool.instances.reserve(source.instances.size());
            for (const auto& [text, label] : source.instances) {
                pool.instances.push_back({text, label});
            }
            return pool;
        }
    }
    throw ContractError("pool_from_source: unknown data source kind");
}

} // namespace popcomp
