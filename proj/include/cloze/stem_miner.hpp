#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cloze/lexicon.hpp"

namespace cloze {

// A sentence with one phrase occurrence marked for blanking. Tokens keep
// their original casing; the blank span matches the phrase words
// case-insensitively.
struct Stem {
    std::vector<std::string> tokens;
    int blank_start = 0;
    int blank_len = 0;
    PhraseId phrase_id = 0;
    long source_line = 0;
};

enum class RejectReason { Ok, TooShort, ForeignChars, PunctuationHeavy, EndsWithColon, SegmentSequence };

std::string_view reject_reason_name(RejectReason r);

struct FilterVerdict {
    bool accepted = false;
    RejectReason reason = RejectReason::Ok;
};

struct FilterOptions {
    int min_words = 10;
    // The segment-sequence heuristic is an approximation: a sentence is
    // treated as a run of fragments when it lacks terminal punctuation or
    // carries at least this many comma/semicolon tokens.
    int max_separators = 4;
};

// Applies the rejection rules in a fixed order and reports the first
// failure: word count, foreign characters, punctuation share, trailing
// colon, segment sequence. Total function, never throws.
FilterVerdict filter_sentence(const std::vector<std::string>& tokens, std::string_view raw,
                              const FilterOptions& opts = {});

struct PhraseMatch {
    int start = 0;
    int len = 0;
    PhraseId phrase_id = 0;
};

// Token-level matcher over lexicon surfaces. Case-insensitive, prefers the
// longest phrase at each position, never yields overlapping spans.
class PhraseMatcher {
public:
    explicit PhraseMatcher(const Lexicon& lexicon);

    std::vector<PhraseMatch> find(const std::vector<std::string>& tokens) const;

private:
    struct Entry {
        std::vector<std::string> words;
        PhraseId phrase_id;
    };
    std::unordered_map<std::string, std::vector<Entry>> by_first_word_;
};

struct MatchRecord {
    long source_line = 0;
    int start = 0;
    int len = 0;
    PhraseId phrase_id = 0;
    std::vector<std::string> tokens;
};

// Scans a one-sentence-per-line stream and yields every match in
// (line, span start) order. Lines that are not valid UTF-8 are skipped and
// counted in *skipped_lines.
std::vector<MatchRecord> match_phrases(std::istream& corpus, const Lexicon& lexicon,
                                       long* skipped_lines = nullptr);

struct MineResult {
    std::vector<Stem> stems;
    std::vector<std::pair<long, RejectReason>> rejections;  // phrase-bearing lines only
    long lines_read = 0;
    long skipped_lines = 0;  // undecodable
};

// match + filter in one pass. Rejections are logged only for lines that
// contained at least one phrase; other lines are simply irrelevant.
MineResult mine_stems(std::istream& corpus, const Lexicon& lexicon, const FilterOptions& opts = {});

struct BalanceResult {
    std::vector<Stem> stems;             // input order preserved
    std::set<PhraseId> surviving;
};

// Keeps only phrases whose stem count lies in [lo, hi] (inclusive); all
// stems of out-of-band phrases are dropped.
BalanceResult balance_by_frequency(const std::vector<Stem>& stems, int lo = 20, int hi = 40);

}  // namespace cloze
