#include "duet/profile.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <set>

namespace duet::profile {

namespace {

constexpr std::array<std::pair<TagCategory, std::string_view>, 8> kCategoryNames{{
    {TagCategory::Gender, "Gender"},
    {TagCategory::Age, "Age"},
    {TagCategory::Nationality, "Nationality"},
    {TagCategory::LanguageProficiency, "LanguageProficiency"},
    {TagCategory::Personality, "Personality"},
    {TagCategory::PreferredTopic, "PreferredTopic"},
    {TagCategory::PreferredContent, "PreferredContent"},
    {TagCategory::InteractionStyle, "InteractionStyle"},
}};

constexpr std::array<std::string_view, 6> kCefrNames{"A1", "A2", "B1", "B2", "C1", "C2"};

// Characters that may never appear inside a tag label.
constexpr std::array<std::string_view, 6> kDelimiters{",", "，", "、", "/", ":", "："};

void fail(const std::string& invariant) {
    throw Error(ErrorCode::InvariantViolation, invariant);
}

std::optional<int> parse_int(std::string_view s) {
    int v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return v;
}

}  // namespace

TagKind kind_of(TagCategory category) {
    switch (category) {
        case TagCategory::PreferredTopic:
        case TagCategory::PreferredContent:
        case TagCategory::InteractionStyle:
            return TagKind::Preference;
        default:
            return TagKind::Metadata;
    }
}

std::string_view to_string(TagCategory category) {
    for (const auto& [c, name] : kCategoryNames) {
        if (c == category) return name;
    }
    return "?";
}

TagCategory category_from_string(std::string_view name) {
    for (const auto& [c, n] : kCategoryNames) {
        if (n == name) return c;
    }
    throw Error(ErrorCode::InvariantViolation, "unknown tag category '" + std::string(name) + "'");
}

const std::vector<TagCategory>& all_categories() {
    static const std::vector<TagCategory> all = [] {
        std::vector<TagCategory> v;
        for (const auto& entry : kCategoryNames) v.push_back(entry.first);
        return v;
    }();
    return all;
}

std::string_view to_string(Polarity polarity) {
    return polarity == Polarity::like ? "like" : "dislike";
}

std::string_view to_string(TagOrigin origin) {
    switch (origin) {
        case TagOrigin::selection: return "selection";
        case TagOrigin::input: return "input";
        case TagOrigin::feedback: return "feedback";
    }
    return "?";
}

Tag make_tag(TagCategory category, std::string_view value, Polarity polarity, TagOrigin origin) {
    Tag tag{category, text::collapse_whitespace(value), polarity, origin};
    if (tag.value.empty()) fail("tag value is empty");
    for (auto d : kDelimiters) {
        if (tag.value.find(d) != std::string::npos) {
            fail("tag value '" + tag.value + "' contains delimiter '" + std::string(d) + "'");
        }
    }
    return tag;
}

bool same_tag(const Tag& a, const Tag& b) {
    return a.category == b.category && a.polarity == b.polarity && text::iequals(a.value, b.value);
}

std::vector<Tag> tags_from_input(std::string_view input, TagCategory category, Polarity polarity) {
    if (text::trim(input).empty()) throw Error(ErrorCode::EmptyInput, "tag input is blank");

    std::string normalized(input);
    for (auto d : kDelimiters) {
        if (d == ":" || d == "：") continue;
        std::size_t pos = 0;
        while ((pos = normalized.find(d, pos)) != std::string::npos) {
            normalized.replace(pos, d.size(), " ");
            pos += 1;
        }
    }

    std::vector<Tag> out;
    std::string collapsed = text::collapse_whitespace(normalized);
    std::size_t start = 0;
    while (start < collapsed.size()) {
        std::size_t end = collapsed.find(' ', start);
        if (end == std::string::npos) end = collapsed.size();
        const std::string token = collapsed.substr(start, end - start);
        start = end + 1;
        if (token.empty()) continue;
        Tag tag = make_tag(category, token, polarity, TagOrigin::input);
        const bool seen = std::any_of(out.begin(), out.end(), [&](const Tag& t) { return same_tag(t, tag); });
        if (!seen) out.push_back(std::move(tag));
    }
    return out;
}

std::string_view to_string(Cefr level) {
    return kCefrNames[static_cast<std::size_t>(level)];
}

Cefr cefr_from_string(std::string_view text) {
    for (std::size_t i = 0; i < kCefrNames.size(); ++i) {
        if (kCefrNames[i] == text) return static_cast<Cefr>(i);
    }
    throw Error(ErrorCode::InvariantViolation, "proficiency '" + std::string(text) + "' is not a CEFR level");
}

std::vector<Tag> ChildProfile::tags_in(TagCategory category, Polarity polarity) const {
    std::vector<Tag> out;
    for (const auto& t : tags) {
        if (t.category == category && t.polarity == polarity) out.push_back(t);
    }
    return out;
}

std::vector<Tag> ChildProfile::preferences() const {
    std::vector<Tag> out;
    for (const auto& t : tags) {
        if (kind_of(t.category) == TagKind::Preference && t.polarity == Polarity::like) out.push_back(t);
    }
    return out;
}

std::vector<Tag> ChildProfile::dislikes() const {
    std::vector<Tag> out;
    for (const auto& t : tags) {
        if (t.polarity == Polarity::dislike) out.push_back(t);
    }
    return out;
}

std::optional<int> ChildProfile::age() const {
    for (const auto& t : tags) {
        if (t.category == TagCategory::Age) return parse_int(t.value);
    }
    return std::nullopt;
}

std::optional<std::string> ChildProfile::gender() const {
    for (const auto& t : tags) {
        if (t.category == TagCategory::Gender) return t.value;
    }
    return std::nullopt;
}

std::optional<std::string> ChildProfile::nationality() const {
    for (const auto& t : tags) {
        if (t.category == TagCategory::Nationality) return t.value;
    }
    return std::nullopt;
}

void validate_profile(const ChildProfile& p) {
    if (text::trim(p.child_id).empty()) fail("child_id is empty");
    if (p.native_language == p.learning_language) fail("native_language equals learning_language");

    int ages = 0;
    int genders = 0;
    for (std::size_t i = 0; i < p.tags.size(); ++i) {
        const Tag& t = p.tags[i];
        // Re-run label validation; tags may arrive through deserialization.
        const Tag normalized = make_tag(t.category, t.value, t.polarity, t.origin);
        if (normalized.value != t.value) fail("tag value '" + t.value + "' is not normalized");
        for (std::size_t k = 0; k < i; ++k) {
            if (same_tag(p.tags[k], t)) {
                fail("duplicate tag (" + std::string(to_string(t.category)) + ", " + t.value + ", " +
                     std::string(to_string(t.polarity)) + ")");
            }
        }
        if (t.category == TagCategory::Age) {
            ++ages;
            const auto age = parse_int(t.value);
            if (!age || *age < kMinAge || *age > kMaxAge) {
                fail("Age tag '" + t.value + "' is not an integer in [4, 18]");
            }
        }
        if (t.category == TagCategory::Gender) ++genders;
    }
    if (ages > 1) fail("more than one Age tag");
    if (genders > 1) fail("more than one Gender tag");
}

bool TargetWordSet::empty() const {
    return size() == 0;
}

std::size_t TargetWordSet::size() const {
    std::size_t n = 0;
    for (const auto& [lang, list] : words_by_language) n += list.size();
    return n;
}

const std::vector<std::string>& TargetWordSet::words(Language lang) const {
    static const std::vector<std::string> none;
    auto it = words_by_language.find(lang);
    return it == words_by_language.end() ? none : it->second;
}

TargetWordSet make_target_words(std::map<Language, std::vector<std::string>> words_by_language) {
    TargetWordSet out;
    for (auto& [lang, list] : words_by_language) {
        std::vector<std::string> cleaned;
        for (const auto& w : list) {
            std::string word = text::collapse_whitespace(w);
            if (word.empty()) {
                throw Error(ErrorCode::InvariantViolation, "empty target word in " + std::string(to_string(lang)));
            }
            const bool dup = std::any_of(cleaned.begin(), cleaned.end(),
                                         [&](const std::string& c) { return text::iequals(c, word); });
            if (dup) throw Error(ErrorCode::DuplicateWord, word);
            cleaned.push_back(std::move(word));
        }
        if (cleaned.empty()) {
            throw Error(ErrorCode::InvariantViolation, "target word list for " + std::string(to_string(lang)) + " is empty");
        }
        out.words_by_language[lang] = std::move(cleaned);
    }
    if (out.words_by_language.empty()) throw Error(ErrorCode::InvariantViolation, "no target words");
    return out;
}

const ChildProfile& SessionConfig::child(std::string_view child_id) const {
    for (const auto& c : children) {
        if (c.child_id == child_id) return c;
    }
    throw Error(ErrorCode::UnknownParticipant, std::string(child_id));
}

ChildProfile& SessionConfig::child(std::string_view child_id) {
    for (auto& c : children) {
        if (c.child_id == child_id) return c;
    }
    throw Error(ErrorCode::UnknownParticipant, std::string(child_id));
}

bool SessionConfig::has_child(std::string_view child_id) const {
    return std::any_of(children.begin(), children.end(), [&](const ChildProfile& c) { return c.child_id == child_id; });
}

const ChildProfile& SessionConfig::other_child(std::string_view child_id) const {
    for (const auto& c : children) {
        if (c.child_id != child_id) return c;
    }
    throw Error(ErrorCode::UnknownParticipant, std::string(child_id));
}

const ChildProfile& SessionConfig::learner_of(Language lang) const {
    for (const auto& c : children) {
        if (c.learning_language == lang) return c;
    }
    throw Error(ErrorCode::InvalidConfig, "no child learns " + std::string(duet::to_string(lang)));
}

void validate_config(const SessionConfig& config) {
    auto bad = [](const std::string& why) { throw Error(ErrorCode::InvalidConfig, why); };
    if (config.children.size() != 2) bad("a session needs exactly two children");
    for (const auto& c : config.children) {
        try {
            validate_profile(c);
        } catch (const Error& e) {
            bad("profile '" + c.child_id + "': " + e.what());
        }
    }
    if (config.children[0].child_id == config.children[1].child_id) bad("children share a child_id");
    if (config.children[0].learning_language == config.children[1].learning_language) {
        bad("children's learning languages must be distinct and cover zh and en");
    }
    if (text::trim(config.coordinator_id).empty()) bad("coordinator_id is empty");
    if (config.coordinator_id == config.children[0].child_id || config.coordinator_id == config.children[1].child_id) {
        bad("coordinator_id collides with a child_id");
    }
    if (config.paragraph_count < kMinParagraphs || config.paragraph_count > kMaxParagraphs) {
        bad("paragraph_count must be within [4, 10]");
    }
    if (config.extension_rounds_per_child < 1) bad("extension_rounds_per_child must be >= 1");
    if (!config.target_words.empty()) {
        try {
            (void)make_target_words(config.target_words.words_by_language);
        } catch (const Error& e) {
            bad(std::string("target_words: ") + e.what());
        }
    }
}

int ProfileStore::upsert(const ChildProfile& profile) {
    validate_profile(profile);
    std::lock_guard lock(mutex_);
    auto it = entries_.find(profile.child_id);
    const int version = it == entries_.end() ? 1 : it->second->version + 1;
    entries_[profile.child_id] = std::make_shared<const Entry>(Entry{profile, version});
    return version;
}

std::shared_ptr<const ProfileStore::Entry> ProfileStore::get(std::string_view child_id) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(child_id);
    return it == entries_.end() ? nullptr : it->second;
}

bool ProfileStore::remove(std::string_view child_id) {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(child_id);
    if (it == entries_.end()) return false;
    entries_.erase(it);
    return true;
}

std::vector<std::string> ProfileStore::ids() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, entry] : entries_) out.push_back(id);
    return out;
}

void to_json(Json& j, TagCategory c) { j = std::string(to_string(c)); }
void from_json(const Json& j, TagCategory& c) { c = category_from_string(j.get<std::string>()); }

void to_json(Json& j, Polarity p) { j = std::string(to_string(p)); }
void from_json(const Json& j, Polarity& p) {
    const auto s = j.get<std::string>();
    if (s == "like") {
        p = Polarity::like;
    } else if (s == "dislike") {
        p = Polarity::dislike;
    } else {
        throw Error(ErrorCode::InvariantViolation, "unknown polarity '" + s + "'");
    }
}

void to_json(Json& j, TagOrigin o) { j = std::string(to_string(o)); }
void from_json(const Json& j, TagOrigin& o) {
    const auto s = j.get<std::string>();
    if (s == "selection") {
        o = TagOrigin::selection;
    } else if (s == "input") {
        o = TagOrigin::input;
    } else if (s == "feedback") {
        o = TagOrigin::feedback;
    } else {
        throw Error(ErrorCode::InvariantViolation, "unknown tag origin '" + s + "'");
    }
}

void to_json(Json& j, Cefr c) { j = std::string(to_string(c)); }
void from_json(const Json& j, Cefr& c) { c = cefr_from_string(j.get<std::string>()); }

void to_json(Json& j, const Tag& t) {
    j = Json{{"category", t.category}, {"value", t.value}, {"polarity", t.polarity}, {"origin", t.origin}};
}

void from_json(const Json& j, Tag& t) {
    t.category = required_field<TagCategory>(j, "category", ErrorCode::InvariantViolation);
    t.value = required_field<std::string>(j, "value", ErrorCode::InvariantViolation);
    t.polarity = optional_field<Polarity>(j, "polarity", Polarity::like, ErrorCode::InvariantViolation);
    t.origin = optional_field<TagOrigin>(j, "origin", TagOrigin::selection, ErrorCode::InvariantViolation);
}

void to_json(Json& j, const ChildProfile& p) {
    j = Json{{"child_id", p.child_id},
             {"display_name", p.display_name},
             {"native_language", p.native_language},
             {"learning_language", p.learning_language},
             {"proficiency", p.proficiency},
             {"tags", p.tags}};
}

void from_json(const Json& j, ChildProfile& p) {
    constexpr auto code = ErrorCode::InvariantViolation;
    p.child_id = required_field<std::string>(j, "child_id", code);
    p.display_name = optional_field<std::string>(j, "display_name", p.child_id, code);
    p.native_language = required_field<Language>(j, "native_language", code);
    p.learning_language = required_field<Language>(j, "learning_language", code);
    p.proficiency = required_field<Cefr>(j, "proficiency", code);
    p.tags = optional_field<std::vector<Tag>>(j, "tags", {}, code);
}

void to_json(Json& j, const TargetWordSet& w) {
    Json words = Json::object();
    for (const auto& [lang, list] : w.words_by_language) words[std::string(duet::to_string(lang))] = list;
    j = Json{{"words_by_language", words}};
}

void from_json(const Json& j, TargetWordSet& w) {
    w.words_by_language.clear();
    const Json& words = j.contains("words_by_language") ? j.at("words_by_language") : j;
    if (!words.is_object()) throw Error(ErrorCode::BadArguments, "words_by_language must be an object");
    for (const auto& [key, list] : words.items()) {
        w.words_by_language[language_from_string(key)] = list.get<std::vector<std::string>>();
    }
}

void to_json(Json& j, const SessionConfig& c) {
    j = Json{{"children", c.children},
             {"target_words", c.target_words},
             {"first_paragraph_language", c.first_paragraph_language},
             {"coordinator_id", c.coordinator_id},
             {"paragraph_count", c.paragraph_count},
             {"extension_rounds_per_child", c.extension_rounds_per_child}};
}

void from_json(const Json& j, SessionConfig& c) {
    constexpr auto code = ErrorCode::InvalidConfig;
    c.children = required_field<std::vector<ChildProfile>>(j, "children", code);
    c.target_words = optional_field<TargetWordSet>(j, "target_words", {}, code);
    c.first_paragraph_language = optional_field<Language>(j, "first_paragraph_language", Language::zh, code);
    c.coordinator_id = required_field<std::string>(j, "coordinator_id", code);
    c.paragraph_count = optional_field<int>(j, "paragraph_count", 6, code);
    c.extension_rounds_per_child = optional_field<int>(j, "extension_rounds_per_child", 2, code);
}

}  // namespace duet::profile
