#include "duet/text.hpp"

#include "duet/error.hpp"

#include <algorithm>

namespace duet {

std::string_view to_string(Language lang) {
    return lang == Language::zh ? "zh" : "en";
}

Language language_from_string(std::string_view text) {
    if (text == "zh") return Language::zh;
    if (text == "en") return Language::en;
    throw Error(ErrorCode::BadArguments, "unknown language '" + std::string(text) + "'");
}

void to_json(nlohmann::json& j, Language lang) {
    j = std::string(to_string(lang));
}

void from_json(const nlohmann::json& j, Language& lang) {
    lang = language_from_string(j.get<std::string>());
}

Language other_language(Language lang) {
    return lang == Language::zh ? Language::en : Language::zh;
}

namespace text {

std::vector<char32_t> decode_utf8(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        char32_t cp = 0;
        if (c < 0x80) {
            len = 1;
            cp = c;
        } else if ((c >> 5) == 0x6) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c >> 4) == 0xE) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c >> 3) == 0x1E) {
            len = 4;
            cp = c & 0x07;
        }
        bool ok = len > 0 && i + len <= s.size();
        for (std::size_t k = 1; ok && k < len; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc >> 6) != 0x2) {
                ok = false;
            } else {
                cp = (cp << 6) | (cc & 0x3F);
            }
        }
        if (!ok) {
            out.push_back(U'\uFFFD');
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string encode_utf8(char32_t cp) {
    std::string out;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
    return out;
}

bool is_cjk(char32_t cp) {
    return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
           (cp >= 0xF900 && cp <= 0xFAFF) || (cp >= 0x20000 && cp <= 0x2A6DF);
}

bool is_word_char(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
    }
    // Latin-1 supplement and Latin extended letters (skipping × and ÷).
    return cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7;
}

namespace {

bool is_space(char32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
           cp == 0x3000 || cp == 0xA0;
}

bool ascii_alnum(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool word_starts_alnum(std::string_view w) {
    return !w.empty() && ascii_alnum(w.front());
}

bool word_ends_alnum(std::string_view w) {
    return !w.empty() && ascii_alnum(w.back());
}

}  // namespace

std::string trim(std::string_view s) {
    const auto cps = decode_utf8(s);
    std::size_t b = 0;
    std::size_t e = cps.size();
    while (b < e && is_space(cps[b])) ++b;
    while (e > b && is_space(cps[e - 1])) --e;
    std::string out;
    for (std::size_t i = b; i < e; ++i) out += encode_utf8(cps[i]);
    return out;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    bool pending_space = false;
    for (char32_t cp : decode_utf8(s)) {
        if (is_space(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += encode_utf8(cp);
    }
    return out;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](char c) {
        return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    });
    return out;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && ascii_lower(a) == ascii_lower(b);
}

std::optional<Span> find_word(std::string_view haystack, std::string_view word, Language lang,
                              std::size_t from) {
    if (word.empty()) return std::nullopt;
    std::size_t pos = from;
    while (pos <= haystack.size()) {
        pos = haystack.find(word, pos);
        if (pos == std::string_view::npos) return std::nullopt;
        const std::size_t end = pos + word.size();
        bool ok = true;
        if (lang == Language::en) {
            if (word_starts_alnum(word) && pos > 0 && ascii_alnum(haystack[pos - 1])) ok = false;
            if (word_ends_alnum(word) && end < haystack.size() && ascii_alnum(haystack[end])) ok = false;
        }
        if (ok) return Span{pos, end};
        ++pos;
    }
    return std::nullopt;
}

std::vector<Span> find_all_words(std::string_view haystack, std::string_view word, Language lang) {
    std::vector<Span> out;
    std::size_t from = 0;
    while (auto span = find_word(haystack, word, lang, from)) {
        out.push_back(*span);
        from = span->end;
    }
    return out;
}

bool contains_token(std::string_view haystack, std::string_view word) {
    const std::string w = ascii_lower(trim(word));
    if (w.empty()) return false;
    const auto cps = decode_utf8(w);
    const bool cjk = std::any_of(cps.begin(), cps.end(), is_cjk);
    const std::string h = ascii_lower(haystack);
    return find_word(h, w, cjk ? Language::zh : Language::en).has_value();
}

std::vector<std::string> word_tokens(std::string_view s) {
    std::vector<std::string> tokens;
    const auto cps = decode_utf8(s);
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(ascii_lower(current));
            current.clear();
        }
    };
    for (std::size_t i = 0; i < cps.size(); ++i) {
        const char32_t cp = cps[i];
        if (is_cjk(cp)) {
            flush();
            tokens.push_back(encode_utf8(cp));
        } else if (is_word_char(cp)) {
            current += encode_utf8(cp);
        } else if ((cp == '\'' || cp == 0x2019) && !current.empty() && i + 1 < cps.size() &&
                   is_word_char(cps[i + 1])) {
            current += '\'';
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

}  // namespace text
}  // namespace duet
