#include "cloze/embeddings.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "cloze/error.hpp"
#include "cloze/hashing.hpp"

namespace cloze {

EmbeddingTable::EmbeddingTable(int dim) : dim_(dim) {
    if (dim < 1) throw DataError("embedding dimension must be positive");
}

void EmbeddingTable::insert(std::string token, Vec vector) {
    if (dim_ == 0) dim_ = static_cast<int>(vector.size());
    if (static_cast<int>(vector.size()) != dim_)
        throw DataError("vector for \"" + token + "\" has dimension " +
                        std::to_string(vector.size()) + ", table dimension is " +
                        std::to_string(dim_));
    if (index_.count(token)) throw DataError("duplicate embedding token \"" + token + "\"");
    index_.emplace(token, entries_.size());
    entries_.emplace_back(std::move(token), std::move(vector));
}

const Vec* EmbeddingTable::find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? nullptr : &entries_[it->second].second;
}

bool EmbeddingTable::operator==(const EmbeddingTable& other) const {
    return dim_ == other.dim_ && entries_ == other.entries_;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const std::string& where) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw DataError(where + ": bad numeric value \"" + std::string(s) + "\"");
    return v;
}

std::vector<std::string_view> split_spaces(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open embeddings file: " + path.string());
    return parse_embeddings(in, path.filename().string());
}

EmbeddingTable parse_embeddings(std::istream& in, const std::string& source_name) {
    std::string line;
    if (!std::getline(in, line))
        throw DataError(source_name + ":1: missing embeddings header");
    auto header = split_spaces(line);
    if (header.size() != 2)
        throw DataError(source_name + ":1: header must be \"<vocab_size> <dim>\"");
    const long vocab = static_cast<long>(parse_double(header[0], source_name + ":1"));
    const int dim = static_cast<int>(parse_double(header[1], source_name + ":1"));
    if (vocab < 0 || dim < 1)
        throw DataError(source_name + ":1: invalid header values");

    EmbeddingTable table(dim);
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_spaces(line);
        const std::string where = source_name + ":" + std::to_string(line_no);
        if (static_cast<int>(fields.size()) != dim + 1)
            throw DataError(where + ": expected 1 token + " + std::to_string(dim) + " values, got " +
                            std::to_string(fields.size()) + " fields");
        Vec v(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i)
            v[static_cast<std::size_t>(i)] = parse_double(fields[static_cast<std::size_t>(i) + 1], where);
        table.insert(std::string(fields[0]), std::move(v));
    }
    if (static_cast<long>(table.size()) != vocab)
        throw DataError(source_name + ": header promises " + std::to_string(vocab) +
                        " entries, file has " + std::to_string(table.size()));
    return table;
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write embeddings file: " + path.string());
    dump_embeddings(table, out);
}

void dump_embeddings(const EmbeddingTable& table, std::ostream& out) {
    out << table.size() << ' ' << table.dim() << '\n';
    for (const auto& [token, vec] : table.entries()) {
        out << token;
        for (double v : vec) out << ' ' << format_double(v);
        out << '\n';
    }
}

Vec mean_of_words(const std::vector<std::string>& words, const EmbeddingTable& table, long* misses) {
    if (table.dim() == 0) throw DataError("mean_of_words: empty embedding table");
    Vec sum(static_cast<std::size_t>(table.dim()), 0.0);
    long present = 0, missing = 0;
    for (const auto& w : words) {
        if (const Vec* v = table.find(w)) {
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
            ++present;
        } else {
            ++missing;
        }
    }
    if (misses) *misses = missing;
    if (present == 0)
        throw DataError("mean_of_words: none of the " + std::to_string(words.size()) +
                        " words is in the table");
    for (double& v : sum) v /= static_cast<double>(present);
    return sum;
}

std::string_view rep_mode_name(RepMode m) {
    switch (m) {
        case RepMode::Random: return "random";
        case RepMode::Def: return "def";
        case RepMode::Lit: return "lit";
        case RepMode::DefPlusRandom: return "def+random";
        case RepMode::LitPlusRandom: return "lit+random";
    }
    return "random";
}

RepMode parse_rep_mode(std::string_view s) {
    if (s == "random") return RepMode::Random;
    if (s == "def") return RepMode::Def;
    if (s == "lit") return RepMode::Lit;
    if (s == "def+random") return RepMode::DefPlusRandom;
    if (s == "lit+random") return RepMode::LitPlusRandom;
    throw ConfigError("unknown representation mode \"" + std::string(s) + "\"");
}

Vec random_rep(int dim, std::uint64_t seed, PhraseId id) {
    Rng rng(mix_seed(seed, 0x9d5c0ff1u + static_cast<std::uint64_t>(id)));
    Vec v(static_cast<std::size_t>(dim));
    for (double& x : v) x = rng.gaussian(0.0, 0.02);
    return v;
}

RepParts build_static_rep_parts(const Phrase& phrase, const StaticRepConfig& cfg,
                                const EmbeddingTable& table) {
    RepParts parts;
    switch (cfg.mode) {
        case RepMode::Random:
            parts.trainable_init = random_rep(table.dim(), cfg.seed, phrase.id);
            break;
        case RepMode::Def:
            parts.frozen = mean_of_words(phrase.definition_words, table);
            break;
        case RepMode::Lit:
            parts.frozen = mean_of_words(phrase.words, table);
            break;
        case RepMode::DefPlusRandom:
            parts.frozen = mean_of_words(phrase.definition_words, table);
            parts.trainable_init = random_rep(table.dim(), cfg.seed, phrase.id);
            break;
        case RepMode::LitPlusRandom:
            parts.frozen = mean_of_words(phrase.words, table);
            parts.trainable_init = random_rep(table.dim(), cfg.seed, phrase.id);
            break;
    }
    return parts;
}

Vec build_static_rep(const Phrase& phrase, const StaticRepConfig& cfg, const EmbeddingTable& table) {
    RepParts parts = build_static_rep_parts(phrase, cfg, table);
    if (parts.frozen.empty()) return parts.trainable_init;
    if (parts.trainable_init.empty()) return parts.frozen;
    if (cfg.concat) {
        Vec out = parts.frozen;
        out.insert(out.end(), parts.trainable_init.begin(), parts.trainable_init.end());
        return out;
    }
    Vec out = parts.frozen;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += parts.trainable_init[i];
    return out;
}

}  // namespace cloze
