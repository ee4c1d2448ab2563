#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cloze/distractors.hpp"
#include "cloze/stem_miner.hpp"

namespace cloze {

struct Question {
    std::string qid;                      // 16 hex digits, stable across runs
    Stem stem;
    std::array<PhraseId, 4> candidates{};
    int answer_index = 0;                 // candidates[answer_index] == stem.phrase_id
    SetType set_type = SetType::R3;
    PoolKind pool = PoolKind::Combined;
    std::string split;                    // "", "train", "valid" or "test"
};

std::string make_qid(PhraseId phrase_id, long source_line, int blank_start, SetType set_type,
                     PoolKind pool);

// Identifies the underlying stem (sentence + blank position); questions
// sharing a stem must never straddle a split or fold boundary.
std::uint64_t stem_group_key(const Question& q);

using CandidateSetIndex = std::map<std::pair<PhraseId, SetType>, CandidateSet>;

// One question per (stem, set type): candidates are the key plus the set's
// three distractors, order shuffled by a permutation seeded per qid.
std::vector<Question> assemble(const std::vector<Stem>& stems, const CandidateSetIndex& sets,
                               const Lexicon& lexicon, PoolKind pool,
                               const std::vector<SetType>& set_types, std::uint64_t seed);

struct SplitSizes {
    long train = 0, valid = 0, test = 0;
};

struct SplitSpec {
    double train_frac = 0.70;
    double valid_frac = 0.20;
    double test_frac = 0.10;
    std::uint64_t seed = 0;

    void validate() const;  // throws ConfigError

    // floor(frac * n) for valid and test, remainder to train.
    SplitSizes sizes_for(long n) const;
};

// Labels each question's `split` in place. Whole stem groups are assigned
// together, so with multi-question groups the realized sizes may deviate
// from the floor targets by less than one group.
SplitSizes split_assign(std::vector<Question>& questions, const SplitSpec& spec);

// Stem-grouped k-fold partition; folds are disjoint and near-equal sized.
std::vector<std::vector<Question>> kfold(const std::vector<Question>& questions, int k,
                                         std::uint64_t seed);

// JSONL question record (object per line, keys sorted).
std::string question_to_json(const Question& q, const Lexicon& lexicon);
Question question_from_json(const std::string& line, const Lexicon& lexicon,
                            const std::string& where);

// Stem text with the blank rendered as "____".
std::string render_stem_text(const Stem& stem);

}  // namespace cloze
