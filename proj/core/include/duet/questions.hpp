#pragma once

#include "duet/gateway.hpp"
#include "duet/profile.hpp"
#include "duet/story.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace duet::questions {

using profile::ChildProfile;

/// Narrative dimensions a guiding question can probe.
enum class Attribute { character, setting, action, feeling, causal_relationship, outcome_resolution, prediction };

const std::array<Attribute, 7>& all_attributes();
std::string_view to_string(Attribute a);
/// Accepts snake_case or space-separated names, case-insensitively.
Attribute attribute_from_string(std::string_view name);
std::optional<Attribute> try_attribute(std::string_view name);

/// ex: answer is in the text; im: open, imagination-demanding.
enum class Explicitness { ex, im };
std::string_view to_string(Explicitness e);
Explicitness explicitness_from_string(std::string_view name);

enum class QuestionStage { cloze, adaptation, extension_teller, extension_listener };
std::string_view to_string(QuestionStage s);

enum class AnchorKind { blank, paragraph, utterance };

struct Anchor {
    AnchorKind kind = AnchorKind::blank;
    int index = 0;             // blank_index or paragraph_index
    std::string utterance_id;  // utterance anchors only

    bool operator==(const Anchor&) const = default;

    /// Text shown next to the question on the shared panel, e.g. "(2)".
    std::string label() const;
};

AnchorKind anchor_kind_for(QuestionStage stage);

struct QuestionSpec {
    QuestionStage stage = QuestionStage::cloze;
    Attribute attribute = Attribute::character;
    Explicitness explicitness = Explicitness::ex;
    std::string target_child;
    Anchor anchor;

    bool operator==(const QuestionSpec&) const = default;
};

enum class QuestionStatus { proposed, selected, answered, skipped };
std::string_view to_string(QuestionStatus s);

struct GeneratedQuestion {
    std::string question_id;
    QuestionSpec spec;
    std::string text;
    Language language = Language::en;
    QuestionStatus status = QuestionStatus::proposed;
    /// Asked by the coordinator in their own words rather than proposed.
    bool coordinator_authored = false;

    bool operator==(const GeneratedQuestion&) const = default;
};

/// Maximum gateway calls per generation request before giving up.
inline constexpr int kMaxAttempts = 3;
inline constexpr int kClozeCount = 3;
inline constexpr int kExtensionCount = 3;

/// Explicit questions for one blank, in the assigned child's learning
/// language. Candidates naming the target word are dropped and the call is
/// repeated; fewer than `count` survivors after kMaxAttempts is
/// GenerationUnavailable. Returned questions carry no id yet.
std::vector<GeneratedQuestion> generate_cloze_questions(const story::ClozeStory& cloze, int blank_index,
                                                        const ChildProfile& child, const std::string& child_description,
                                                        gateway::Gateway& gw, const gateway::TemplateLibrary& templates,
                                                        int count = kClozeCount);

/// At least one question per attribute and both explicitness values.
std::vector<GeneratedQuestion> generate_adaptation_questions(const std::vector<story::Paragraph>& story,
                                                             int paragraph_index, const ChildProfile& child,
                                                             const std::string& child_description,
                                                             gateway::Gateway& gw,
                                                             const gateway::TemplateLibrary& templates);

struct ExtensionQuestions {
    std::vector<GeneratedQuestion> teller;
    std::vector<GeneratedQuestion> listener;
};

/// Implicit detail questions for the storyteller, explicit comprehension
/// questions for the listener.
ExtensionQuestions generate_extension_questions(const std::vector<story::Paragraph>& story,
                                                const std::string& utterance, const std::string& utterance_id,
                                                const ChildProfile& teller, const std::string& teller_description,
                                                const ChildProfile& listener, const std::string& listener_description,
                                                gateway::Gateway& gw, const gateway::TemplateLibrary& templates);

/// Questions grouped by attribute, every attribute present as a key.
std::map<Attribute, std::vector<const GeneratedQuestion*>> group_by_attribute(
    const std::vector<GeneratedQuestion>& questions);

/// True when the set covers all attributes and both explicitness values.
bool covers_matrix(const std::vector<GeneratedQuestion>& questions);

void to_json(Json& j, Attribute a);
void from_json(const Json& j, Attribute& a);
void to_json(Json& j, Explicitness e);
void from_json(const Json& j, Explicitness& e);
void to_json(Json& j, QuestionStage s);
void from_json(const Json& j, QuestionStage& s);
void to_json(Json& j, QuestionStatus s);
void from_json(const Json& j, QuestionStatus& s);
void to_json(Json& j, const Anchor& a);
void from_json(const Json& j, Anchor& a);
void to_json(Json& j, const QuestionSpec& s);
void from_json(const Json& j, QuestionSpec& s);
void to_json(Json& j, const GeneratedQuestion& q);
void from_json(const Json& j, GeneratedQuestion& q);

}  // namespace duet::questions
