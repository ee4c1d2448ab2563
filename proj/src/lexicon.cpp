#include "cloze/lexicon.hpp"

#include <fstream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "cloze/error.hpp"
#include "cloze/text.hpp"

namespace cloze {

std::string_view kind_name(PhraseKind k) {
    return k == PhraseKind::Idiom ? "idiom" : "fixed";
}

PhraseKind parse_kind(std::string_view s) {
    const std::string lower = to_lower(s);
    if (lower == "idiom") return PhraseKind::Idiom;
    if (lower == "fixed" || lower == "fixedexpression" || lower == "fixed_expression") {
        return PhraseKind::FixedExpression;
    }
    throw DataError("unknown phrase kind \"" + std::string(s) + "\" (expected \"idiom\" or \"fixed\")");
}

namespace {

// Lowercase + collapse to single-space word separation.
std::vector<std::string> normalize_surface_words(std::string_view raw) {
    std::vector<std::string> words;
    std::string current;
    for (char c : raw) {
        if (c == ' ' || c == '\t') {
            if (!current.empty()) {
                words.push_back(to_lower(current));
                current.clear();
            }
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) words.push_back(to_lower(current));
    return words;
}

}  // namespace

void Lexicon::insert(Phrase p, long line_no, const std::string& source_name) {
    if (auto it = index_.find(p.surface); it != index_.end()) {
        throw DataError(source_name + ":" + std::to_string(line_no) + ": duplicate surface \"" +
                        p.surface + "\" (first defined at line " +
                        std::to_string(source_lines_.at(p.surface)) + ")");
    }
    p.id = static_cast<PhraseId>(phrases_.size());
    index_.emplace(p.surface, p.id);
    source_lines_.emplace(p.surface, line_no);
    phrases_.push_back(std::move(p));
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open lexicon file: " + path.string());
    return parse(in, path.filename().string());
}

Lexicon Lexicon::parse(std::istream& in, const std::string& source_name) {
    Lexicon lex;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (rtrim(line).empty()) continue;

        nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object() || !rec.contains("surface") ||
            !rec.contains("kind") || !rec.contains("definition") ||
            !rec["surface"].is_string() || !rec["kind"].is_string() ||
            !rec["definition"].is_string()) {
            throw DataError(source_name + ":" + std::to_string(line_no) +
                            ": malformed lexicon record");
        }

        Phrase p;
        p.words = normalize_surface_words(rec["surface"].get<std::string>());
        if (p.words.size() < 2) {
            throw DataError(source_name + ":" + std::to_string(line_no) +
                            ": phrase must have at least two words: \"" +
                            rec["surface"].get<std::string>() + "\"");
        }
        p.surface = join(p.words, " ");
        try {
            p.kind = parse_kind(rec["kind"].get<std::string>());
        } catch (const DataError& e) {
            throw DataError(source_name + ":" + std::to_string(line_no) + ": " + e.what());
        }
        p.definition_words = definition_tokens(rec["definition"].get<std::string>());
        if (p.definition_words.empty()) {
            throw DataError(source_name + ":" + std::to_string(line_no) +
                            ": empty definition for \"" + p.surface + "\"");
        }
        lex.insert(std::move(p), line_no, source_name);
    }
    return lex;
}

Lexicon Lexicon::from_entries(
    const std::vector<std::tuple<std::string, std::string, std::string>>& entries) {
    std::ostringstream buf;
    for (const auto& [surface, kind, definition] : entries) {
        nlohmann::json rec{{"surface", surface}, {"kind", kind}, {"definition", definition}};
        buf << rec.dump() << '\n';
    }
    std::istringstream in(buf.str());
    return parse(in, "<memory>");
}

void Lexicon::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write lexicon file: " + path.string());
    dump(out);
}

void Lexicon::dump(std::ostream& out) const {
    for (const auto& p : phrases_) {
        nlohmann::json rec{{"surface", p.surface},
                           {"kind", std::string(kind_name(p.kind))},
                           {"definition", join(p.definition_words, " ")}};
        out << rec.dump() << '\n';
    }
}

const Phrase* Lexicon::find(std::string_view surface) const {
    auto it = index_.find(std::string(surface));
    return it == index_.end() ? nullptr : &phrases_[static_cast<std::size_t>(it->second)];
}

const Phrase& Lexicon::at(PhraseId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= phrases_.size())
        throw DataError("phrase id out of range: " + std::to_string(id));
    return phrases_[static_cast<std::size_t>(id)];
}

std::pair<std::vector<Phrase>, std::vector<Phrase>> partition_by_kind(const Lexicon& lexicon) {
    std::vector<Phrase> idioms, fixed;
    for (const auto& p : lexicon.phrases()) {
        (p.kind == PhraseKind::Idiom ? idioms : fixed).push_back(p);
    }
    return {std::move(idioms), std::move(fixed)};
}

}  // namespace cloze
