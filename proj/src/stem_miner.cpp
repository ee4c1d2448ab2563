#include "cloze/stem_miner.hpp"

#include <algorithm>
#include <istream>
#include <map>

#include "cloze/error.hpp"
#include "cloze/text.hpp"

namespace cloze {

std::string_view reject_reason_name(RejectReason r) {
    switch (r) {
        case RejectReason::Ok: return "ok";
        case RejectReason::TooShort: return "too_short";
        case RejectReason::ForeignChars: return "foreign_chars";
        case RejectReason::PunctuationHeavy: return "punctuation_heavy";
        case RejectReason::EndsWithColon: return "ends_with_colon";
        case RejectReason::SegmentSequence: return "segment_sequence";
    }
    return "ok";
}

namespace {

bool char_allowed(char c) {
    const unsigned char u = static_cast<unsigned char>(c);
    return u == '\t' || (u >= 0x20 && u <= 0x7E);
}

}  // namespace

FilterVerdict filter_sentence(const std::vector<std::string>& tokens, std::string_view raw,
                              const FilterOptions& opts) {
    if (word_token_count(tokens) < static_cast<std::size_t>(opts.min_words))
        return {false, RejectReason::TooShort};

    for (char c : raw)
        if (!char_allowed(c)) return {false, RejectReason::ForeignChars};

    std::size_t punct = 0;
    for (const auto& t : tokens)
        if (is_punct_token(t)) ++punct;
    if (punct > tokens.size() / 3) return {false, RejectReason::PunctuationHeavy};

    const std::string_view trimmed = rtrim(raw);
    if (!trimmed.empty() && trimmed.back() == ':') return {false, RejectReason::EndsWithColon};

    const bool terminal =
        !trimmed.empty() && (trimmed.back() == '.' || trimmed.back() == '!' || trimmed.back() == '?');
    std::size_t separators = 0;
    for (const auto& t : tokens)
        if (t == "," || t == ";") ++separators;
    if (!terminal || separators >= static_cast<std::size_t>(opts.max_separators))
        return {false, RejectReason::SegmentSequence};

    return {true, RejectReason::Ok};
}

PhraseMatcher::PhraseMatcher(const Lexicon& lexicon) {
    for (const auto& p : lexicon.phrases()) {
        by_first_word_[p.words.front()].push_back({p.words, p.id});
    }
    // Longest first so the match at a position is maximal.
    for (auto& [_, entries] : by_first_word_) {
        std::stable_sort(entries.begin(), entries.end(),
                         [](const Entry& a, const Entry& b) { return a.words.size() > b.words.size(); });
    }
}

std::vector<PhraseMatch> PhraseMatcher::find(const std::vector<std::string>& tokens) const {
    std::vector<std::string> lowered;
    lowered.reserve(tokens.size());
    for (const auto& t : tokens) lowered.push_back(to_lower(t));

    std::vector<PhraseMatch> matches;
    std::size_t i = 0;
    while (i < lowered.size()) {
        auto it = by_first_word_.find(lowered[i]);
        if (it != by_first_word_.end()) {
            const Entry* hit = nullptr;
            for (const auto& entry : it->second) {
                if (i + entry.words.size() > lowered.size()) continue;
                bool all = true;
                for (std::size_t k = 1; k < entry.words.size(); ++k) {
                    if (lowered[i + k] != entry.words[k]) {
                        all = false;
                        break;
                    }
                }
                if (all) {
                    hit = &entry;
                    break;  // entries are longest-first
                }
            }
            if (hit) {
                matches.push_back({static_cast<int>(i), static_cast<int>(hit->words.size()), hit->phrase_id});
                i += hit->words.size();
                continue;
            }
        }
        ++i;
    }
    return matches;
}

std::vector<MatchRecord> match_phrases(std::istream& corpus, const Lexicon& lexicon,
                                       long* skipped_lines) {
    PhraseMatcher matcher(lexicon);
    std::vector<MatchRecord> records;
    std::string line;
    long line_no = 0;
    long skipped = 0;
    while (std::getline(corpus, line)) {
        ++line_no;
        if (!utf8_valid(line)) {
            ++skipped;
            continue;
        }
        auto tokens = tokenize(line);
        for (const auto& m : matcher.find(tokens)) {
            records.push_back({line_no, m.start, m.len, m.phrase_id, tokens});
        }
    }
    if (skipped_lines) *skipped_lines = skipped;
    return records;
}

MineResult mine_stems(std::istream& corpus, const Lexicon& lexicon, const FilterOptions& opts) {
    PhraseMatcher matcher(lexicon);
    MineResult result;
    std::string line;
    while (std::getline(corpus, line)) {
        ++result.lines_read;
        if (!utf8_valid(line)) {
            ++result.skipped_lines;
            continue;
        }
        auto tokens = tokenize(line);
        auto matches = matcher.find(tokens);
        if (matches.empty()) continue;

        const FilterVerdict verdict = filter_sentence(tokens, line, opts);
        if (!verdict.accepted) {
            result.rejections.emplace_back(result.lines_read, verdict.reason);
            continue;
        }
        for (const auto& m : matches) {
            result.stems.push_back({tokens, m.start, m.len, m.phrase_id, result.lines_read});
        }
    }
    return result;
}

BalanceResult balance_by_frequency(const std::vector<Stem>& stems, int lo, int hi) {
    if (lo > hi)
        throw ConfigError("frequency band is empty: lo=" + std::to_string(lo) +
                          " > hi=" + std::to_string(hi));

    std::map<PhraseId, long> counts;
    for (const auto& s : stems) ++counts[s.phrase_id];

    BalanceResult result;
    for (const auto& [id, n] : counts) {
        if (n >= lo && n <= hi) result.surviving.insert(id);
    }
    for (const auto& s : stems) {
        if (result.surviving.count(s.phrase_id)) result.stems.push_back(s);
    }
    return result;
}

}  // namespace cloze
