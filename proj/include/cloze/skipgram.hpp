#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cloze/embeddings.hpp"

namespace cloze {

struct SkipgramParams {
    int dim = 100;
    int window = 5;
    int negatives = 5;
    int epochs = 5;
    int min_count = 1;
    double learning_rate = 0.025;
    double sample = 0.0;  // frequent-word subsampling threshold; 0 disables
    int jobs = 1;         // >1 updates shared weights concurrently (not reproducible)
    std::uint64_t seed = 1;
};

// Skip-gram with negative sampling over pre-tokenized sentences.
// Deterministic for a fixed seed when jobs == 1.
EmbeddingTable train_skipgram(const std::vector<std::vector<std::string>>& sentences,
                              const SkipgramParams& params);

// Convenience wrapper: one sentence per line, tokenized and lowercased.
EmbeddingTable train_skipgram_text(std::istream& corpus, const SkipgramParams& params);

}  // namespace cloze
