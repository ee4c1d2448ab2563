#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cloze/lexicon.hpp"
#include "cloze/vec.hpp"

namespace cloze {

// token -> dense vector, fixed dimension. Entries keep insertion order so
// that serialization is reproducible. A lookup miss is explicit (nullptr),
// never a silent zero.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(int dim);

    int dim() const { return dim_; }
    std::size_t size() const { return entries_.size(); }

    void insert(std::string token, Vec vector);  // throws DataError on dim mismatch/duplicate
    const Vec* find(std::string_view token) const;
    bool contains(std::string_view token) const { return find(token) != nullptr; }

    const std::vector<std::pair<std::string, Vec>>& entries() const { return entries_; }

    bool operator==(const EmbeddingTable& other) const;

private:
    int dim_ = 0;
    std::vector<std::pair<std::string, Vec>> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Plain text vector format: header "<vocab_size> <dim>", then one
// "<token> <f1> ... <fd>" line per entry. Values are written with shortest
// round-trip precision, so save followed by load reproduces the table
// exactly.
EmbeddingTable load_embeddings(const std::filesystem::path& path);
EmbeddingTable parse_embeddings(std::istream& in, const std::string& source_name);
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);
void dump_embeddings(const EmbeddingTable& table, std::ostream& out);

// Component-wise mean over the words found in the table. Words missing from
// the table are skipped and counted in *misses; if no word is present the
// call fails.
Vec mean_of_words(const std::vector<std::string>& words, const EmbeddingTable& table,
                  long* misses = nullptr);

enum class RepMode { Random, Def, Lit, DefPlusRandom, LitPlusRandom };

std::string_view rep_mode_name(RepMode m);
RepMode parse_rep_mode(std::string_view s);  // throws ConfigError

struct StaticRepConfig {
    RepMode mode = RepMode::Random;
    std::uint64_t seed = 0;
    // When set, the +Random modes concatenate the random part after the
    // static mean instead of summing, doubling the output dimension.
    bool concat = false;
};

// Seeded Gaussian(0, 0.02) draw, reproducible per (seed, phrase id).
Vec random_rep(int dim, std::uint64_t seed, PhraseId id);

// Initial static representation of a phrase:
//   Random        -> seeded random vector
//   Def           -> mean of definition-word vectors
//   Lit           -> mean of constituent-word vectors
//   Def/Lit+Random-> static mean combined with the random vector
Vec build_static_rep(const Phrase& phrase, const StaticRepConfig& cfg, const EmbeddingTable& table);

// Same decomposition the trainer needs: the frozen static summand and the
// trainable random summand (either may be absent depending on mode).
struct RepParts {
    Vec frozen;
    Vec trainable_init;
};
RepParts build_static_rep_parts(const Phrase& phrase, const StaticRepConfig& cfg,
                                const EmbeddingTable& table);

}  // namespace cloze
