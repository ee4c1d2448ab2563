#include "cloze/text.hpp"

namespace cloze {

bool is_ascii_punct(char c) {
    const unsigned char u = static_cast<unsigned char>(c);
    return (u >= 0x21 && u <= 0x2F) || (u >= 0x3A && u <= 0x40) ||
           (u >= 0x5B && u <= 0x60) || (u >= 0x7B && u <= 0x7E);
}

bool is_punct_token(std::string_view token) {
    if (token.empty()) return false;
    for (char c : token)
        if (!is_ascii_punct(c)) return false;
    return true;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

}  // namespace

std::vector<std::string> tokenize(std::string_view raw) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < raw.size()) {
        while (i < raw.size() && is_space(raw[i])) ++i;
        if (i >= raw.size()) break;
        std::size_t j = i;
        while (j < raw.size() && !is_space(raw[j])) ++j;
        std::string_view chunk = raw.substr(i, j - i);
        i = j;

        std::size_t begin = 0, end = chunk.size();
        while (begin < end && is_ascii_punct(chunk[begin])) ++begin;
        while (end > begin && is_ascii_punct(chunk[end - 1])) --end;
        for (std::size_t p = 0; p < begin; ++p) tokens.emplace_back(1, chunk[p]);
        if (begin < end) tokens.emplace_back(chunk.substr(begin, end - begin));
        for (std::size_t p = end; p < chunk.size(); ++p) tokens.emplace_back(1, chunk[p]);
    }
    return tokens;
}

std::size_t word_token_count(const std::vector<std::string>& tokens) {
    std::size_t n = 0;
    for (const auto& t : tokens)
        if (!is_punct_token(t)) ++n;
    return n;
}

std::vector<std::string> definition_tokens(std::string_view raw) {
    std::string cleaned;
    cleaned.reserve(raw.size());
    for (char c : raw) {
        if (is_ascii_punct(c)) continue;
        cleaned.push_back(c);
    }
    std::vector<std::string> words;
    for (auto& tok : tokenize(cleaned)) words.push_back(to_lower(tok));
    return words;
}

bool utf8_valid(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char c = static_cast<unsigned char>(s[i]);
        std::size_t len;
        if (c < 0x80) {
            len = 1;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            if (c < 0xC2) return false;  // overlong
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            if (c > 0xF4) return false;  // beyond U+10FFFF
        } else {
            return false;
        }
        if (i + len > s.size()) return false;
        for (std::size_t k = 1; k < len; ++k)
            if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
        i += len;
    }
    return true;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

std::string_view rtrim(std::string_view s) {
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

}  // namespace cloze
