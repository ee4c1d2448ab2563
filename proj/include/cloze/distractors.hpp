#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cloze/embeddings.hpp"
#include "cloze/lexicon.hpp"
#include "cloze/vec.hpp"

namespace cloze {

enum class SetType { R3, H3, S3, H1S2, S1H2 };
inline constexpr std::array<SetType, 5> kAllSetTypes{SetType::R3, SetType::H3, SetType::S3,
                                                     SetType::H1S2, SetType::S1H2};

std::string_view set_type_name(SetType t);     // "3RD", "3HD", "3SD", "1H2S", "1S2H"
SetType parse_set_type(std::string_view s);    // throws ConfigError

enum class PoolKind { Idioms, Fixed, Combined };
inline constexpr std::array<PoolKind, 3> kAllPools{PoolKind::Idioms, PoolKind::Fixed,
                                                   PoolKind::Combined};

std::string_view pool_name(PoolKind p);        // "idioms", "fixed", "combined"
PoolKind parse_pool(std::string_view s);       // throws ConfigError

// One key plus exactly three pairwise-distinct distractors, all drawn from
// the declared pool.
struct CandidateSet {
    PhraseId key_id = 0;
    std::array<PhraseId, 3> distractor_ids{};
    SetType set_type = SetType::R3;
    PoolKind pool = PoolKind::Combined;
};

// Unit-cost edit distance over the full character sequence (spaces count).
int levenshtein(std::string_view a, std::string_view b);

using RepMap = std::map<PhraseId, Vec>;

// Phrase representations for similarity ranking: mean of constituent-word
// vectors by default, or a single phrase token ("a_b") when phrase_token
// is set. Phrases with no covered words are left out.
RepMap phrase_reps(const std::vector<Phrase>& pool, const EmbeddingTable& table,
                   bool phrase_token = false);

// Full rankings. Ties resolve by ascending surface; the key is excluded.
std::vector<PhraseId> ranked_by_distance(const Phrase& key, const std::vector<Phrase>& pool);
std::vector<PhraseId> ranked_by_similarity(const Phrase& key, const std::vector<Phrase>& pool,
                                           const RepMap& reps, long* skipped = nullptr);

std::vector<PhraseId> homonymy_distractors(const Phrase& key, const std::vector<Phrase>& pool,
                                           int k = 3);
std::vector<PhraseId> semantic_distractors(const Phrase& key, const std::vector<Phrase>& pool,
                                           const RepMap& reps, int k = 3, long* skipped = nullptr);
// Uniform sample without replacement, reproducible per (seed, key id).
std::vector<PhraseId> random_distractors(const Phrase& key, const std::vector<Phrase>& pool,
                                         int k, std::uint64_t seed);

// Builds one candidate set. Mixed types take the leading strategy's picks
// first; when the second strategy would repeat one of them, its ranked list
// advances to the next item.
CandidateSet compose_candidate_set(const Phrase& key, SetType set_type,
                                   const std::vector<Phrase>& pool, PoolKind pool_tag,
                                   const RepMap& reps, std::uint64_t seed);

// Audit dumps of the pairwise matrices (CSV, surfaces as row/column labels).
void dump_distance_matrix(const std::vector<Phrase>& pool, std::ostream& out);
void dump_similarity_matrix(const std::vector<Phrase>& pool, const RepMap& reps, std::ostream& out);

}  // namespace cloze
