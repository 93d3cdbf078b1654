#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace duet {

enum class Language { zh, en };

std::string_view to_string(Language lang);
Language language_from_string(std::string_view text);
void to_json(nlohmann::json& j, Language lang);
void from_json(const nlohmann::json& j, Language& lang);

Language other_language(Language lang);

namespace text {

/// Decodes UTF-8 into code points. Invalid sequences decode to U+FFFD one byte at a time.
std::vector<char32_t> decode_utf8(std::string_view s);
std::string encode_utf8(char32_t cp);

bool is_cjk(char32_t cp);
bool is_word_char(char32_t cp);

std::string trim(std::string_view s);
/// Trims, then collapses internal runs of whitespace (ASCII and U+3000) to one space.
std::string collapse_whitespace(std::string_view s);
std::string ascii_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

/// Byte range [begin, end) into a UTF-8 string.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool overlaps(const Span& other) const { return begin < other.end && other.begin < end; }
    bool operator==(const Span&) const = default;
};

/// Occurrence of `word` in `haystack` at or after `from`. English matches are
/// case-sensitive with an ASCII word-boundary check on both sides; Chinese
/// matches are plain substrings.
std::optional<Span> find_word(std::string_view haystack, std::string_view word, Language lang,
                              std::size_t from = 0);

/// All non-overlapping occurrences, left to right.
std::vector<Span> find_all_words(std::string_view haystack, std::string_view word, Language lang);

/// True when `word` appears in `haystack` as a standalone token. English is
/// compared case-insensitively on word boundaries; CJK words by substring.
bool contains_token(std::string_view haystack, std::string_view word);

/// Splits on word boundaries: runs of letters/digits (apostrophes allowed
/// between letters) form one token, each CJK ideograph is its own token.
/// Returned tokens are lowercased (ASCII).
std::vector<std::string> word_tokens(std::string_view s);

}  // namespace text
}  // namespace duet
