#pragma once

#include <stdexcept>
#include <string>

namespace cloze {

// Bad or missing configuration (paths, fraction sums, invalid mode combos).
// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or insufficient input data (corpus, lexicon, embeddings, pools).
// The CLI maps this to exit code 1.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cloze
