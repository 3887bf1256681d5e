#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "popcomp/population.hpp"

namespace popcomp {

struct Instance {
    std::string text;
    std::string label;
};

// Index-addressable labeled corpus with a stable class ordering.
struct DataPool {
    std::vector<Instance> instances;
    std::vector<std::string> class_set;
};

// Balanced two-class corpus ("neg"/"pos"): the vocabulary is split in
// half, each class draws its tokens from its own half with probability
// class_signal_strength and uniformly from the full vocabulary otherwise.
// signal 1.0 gives disjoint class vocabularies, signal 0.0 makes labels
// independent of the text. Deterministic from the seed.
DataPool generate_synthetic_corpus(std::size_t n_docs, std::size_t vocab_size,
                                   double class_signal_strength, std::size_t doc_length,
                                   std::uint64_t seed);

// Pool of bare indices for executors that never look at the text
// (instances "0".."size-1" with alternating labels).
DataPool make_index_pool(std::size_t size);

// Realizes the pool described by a data source. Corpus generation seeds
// from derive_seed(master_seed, ["corpus"]).
DataPool pool_from_source(const DataSource& source, std::uint64_t master_seed);

} // namespace popcomp
