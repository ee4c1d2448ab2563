#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cloze {

// ASCII-only predicates. Bytes >= 0x80 are neither letters nor punctuation
// here; sentences containing them are rejected by the foreign-character
// filter before anything downstream sees them.
bool is_ascii_punct(char c);
bool is_punct_token(std::string_view token);

std::string to_lower(std::string_view s);

// Whitespace split with leading/trailing punctuation peeled off into
// separate single-character tokens: "(word)," -> "(", "word", ")", ",".
// Interior punctuation stays put ("3.5", "don't").
std::vector<std::string> tokenize(std::string_view raw);

// Number of non-punctuation tokens.
std::size_t word_token_count(const std::vector<std::string>& tokens);

// Definition strings are reduced to plain lowercase words: punctuation
// stripped, then whitespace split.
std::vector<std::string> definition_tokens(std::string_view raw);

bool utf8_valid(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string_view rtrim(std::string_view s);

}  // namespace cloze
