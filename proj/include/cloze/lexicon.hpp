#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cloze {

enum class PhraseKind { Idiom, FixedExpression };

std::string_view kind_name(PhraseKind k);          // "idiom" / "fixed"
PhraseKind parse_kind(std::string_view s);         // throws DataError

using PhraseId = int;

// One dictionary entry. `surface` is lowercase with single-space word
// separation; `words` is exactly `surface` split on spaces.
struct Phrase {
    PhraseId id = 0;
    std::string surface;
    std::vector<std::string> words;
    PhraseKind kind = PhraseKind::Idiom;
    std::vector<std::string> definition_words;
};

// Immutable after load; safe to share across threads.
class Lexicon {
public:
    Lexicon() = default;

    static Lexicon load(const std::filesystem::path& path);
    static Lexicon parse(std::istream& in, const std::string& source_name);

    // Builds from (surface, kind, definition) triples; same validation as
    // file loading. Handy for tests and the Python bindings.
    static Lexicon from_entries(
        const std::vector<std::tuple<std::string, std::string, std::string>>& entries);

    void save(const std::filesystem::path& path) const;
    void dump(std::ostream& out) const;

    const std::vector<Phrase>& phrases() const { return phrases_; }
    std::size_t size() const { return phrases_.size(); }
    bool empty() const { return phrases_.empty(); }

    // Lookup by normalized surface. nullptr when absent.
    const Phrase* find(std::string_view surface) const;
    const Phrase& at(PhraseId id) const;

private:
    void insert(Phrase p, long line_no, const std::string& source_name);

    std::vector<Phrase> phrases_;
    std::unordered_map<std::string, PhraseId> index_;
    std::unordered_map<std::string, long> source_lines_;  // surface -> defining line
};

// Disjoint partition by kind, order preserved.
std::pair<std::vector<Phrase>, std::vector<Phrase>> partition_by_kind(const Lexicon& lexicon);

}  // namespace cloze
