#pragma once

#include "duet/json_util.hpp"
#include "duet/text.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace duet::profile {

enum class TagKind { Metadata, Preference };

/// Closed set of configuration-panel fields.
enum class TagCategory {
    Gender,
    Age,
    Nationality,
    LanguageProficiency,
    Personality,
    PreferredTopic,
    PreferredContent,
    InteractionStyle,
};

enum class Polarity { like, dislike };
enum class TagOrigin { selection, input, feedback };

TagKind kind_of(TagCategory category);
std::string_view to_string(TagCategory category);
TagCategory category_from_string(std::string_view name);
std::string_view to_string(Polarity polarity);
std::string_view to_string(TagOrigin origin);
const std::vector<TagCategory>& all_categories();

struct Tag {
    TagCategory category = TagCategory::PreferredTopic;
    std::string value;
    Polarity polarity = Polarity::like;
    TagOrigin origin = TagOrigin::selection;

    bool operator==(const Tag&) const = default;
};

/// Normalizes the label (trim + collapse whitespace) and validates it.
/// Throws InvariantViolation on an empty label or one containing delimiters.
Tag make_tag(TagCategory category, std::string_view value, Polarity polarity = Polarity::like,
             TagOrigin origin = TagOrigin::selection);

/// Uniqueness key: (category, case-folded value, polarity).
bool same_tag(const Tag& a, const Tag& b);

/// Free-text tag entry. Splits on whitespace, ',', '，', '、' and '/', trims,
/// and de-duplicates case-insensitively preserving first-seen order.
std::vector<Tag> tags_from_input(std::string_view text, TagCategory category, Polarity polarity);

enum class Cefr { A1, A2, B1, B2, C1, C2 };
std::string_view to_string(Cefr level);
Cefr cefr_from_string(std::string_view text);

struct ChildProfile {
    std::string child_id;
    std::string display_name;
    Language native_language = Language::en;
    Language learning_language = Language::zh;
    Cefr proficiency = Cefr::A1;
    std::vector<Tag> tags;

    bool operator==(const ChildProfile&) const = default;

    std::vector<Tag> tags_in(TagCategory category, Polarity polarity = Polarity::like) const;
    std::vector<Tag> preferences() const;
    std::vector<Tag> dislikes() const;
    std::optional<int> age() const;
    std::optional<std::string> gender() const;
    std::optional<std::string> nationality() const;
};

inline constexpr int kMinAge = 4;
inline constexpr int kMaxAge = 18;

/// Throws InvariantViolation naming the first failed invariant.
void validate_profile(const ChildProfile& profile);

struct TargetWordSet {
    std::map<Language, std::vector<std::string>> words_by_language;

    bool operator==(const TargetWordSet&) const = default;

    bool empty() const;
    std::size_t size() const;
    const std::vector<std::string>& words(Language lang) const;
};

/// Trims every word, then checks invariants. Throws DuplicateWord or InvariantViolation.
TargetWordSet make_target_words(std::map<Language, std::vector<std::string>> words_by_language);

struct SessionConfig {
    std::vector<ChildProfile> children;
    TargetWordSet target_words;
    Language first_paragraph_language = Language::zh;
    std::string coordinator_id;
    int paragraph_count = 6;
    int extension_rounds_per_child = 2;

    bool operator==(const SessionConfig&) const = default;

    const ChildProfile& child(std::string_view child_id) const;
    ChildProfile& child(std::string_view child_id);
    bool has_child(std::string_view child_id) const;
    const ChildProfile& other_child(std::string_view child_id) const;
    /// The child whose learning language is `lang`.
    const ChildProfile& learner_of(Language lang) const;
};

inline constexpr int kMinParagraphs = 4;
inline constexpr int kMaxParagraphs = 10;

/// Throws InvalidConfig naming the failed invariant.
void validate_config(const SessionConfig& config);

/// Versioned profile store. Writes are serialized; reads hand out immutable snapshots.
class ProfileStore {
public:
    struct Entry {
        ChildProfile profile;
        int version = 0;
    };

    /// Validates, then inserts or atomically replaces. Returns the new version.
    int upsert(const ChildProfile& profile);
    std::shared_ptr<const Entry> get(std::string_view child_id) const;
    bool remove(std::string_view child_id);
    std::vector<std::string> ids() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<const Entry>, std::less<>> entries_;
};

void to_json(Json& j, TagCategory c);
void from_json(const Json& j, TagCategory& c);
void to_json(Json& j, Polarity p);
void from_json(const Json& j, Polarity& p);
void to_json(Json& j, TagOrigin o);
void from_json(const Json& j, TagOrigin& o);
void to_json(Json& j, Cefr c);
void from_json(const Json& j, Cefr& c);
void to_json(Json& j, const Tag& t);
void from_json(const Json& j, Tag& t);
void to_json(Json& j, const ChildProfile& p);
void from_json(const Json& j, ChildProfile& p);
void to_json(Json& j, const TargetWordSet& w);
void from_json(const Json& j, TargetWordSet& w);
void to_json(Json& j, const SessionConfig& c);
void from_json(const Json& j, SessionConfig& c);

}  // namespace duet::profile
