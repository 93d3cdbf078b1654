#pragma once

#include "duet/characteristics.hpp"
#include "duet/gateway.hpp"
#include "duet/profile.hpp"

#include <optional>
#include <string>
#include <vector>

namespace duet::materials {

enum class MaterialStatus { proposed, presented };

struct Material {
    std::string material_id;
    std::string keyword;
    std::string target_child;
    /// In the target child's native language.
    std::string explanation_text;
    std::optional<std::string> cultural_analogy;
    std::optional<gateway::ImageDescriptor> image;
    MaterialStatus status = MaterialStatus::proposed;
    /// Image generation failed; the material is text-only.
    bool degraded = false;
    std::optional<profile::Cefr> difficulty;
    /// Advisory findings; never block presentation.
    std::vector<std::string> flags;
    /// Explanation words missing from an applicable exam-level wordlist.
    std::vector<std::string> flagged_words;

    bool operator==(const Material&) const = default;
};

inline constexpr const char* kFlagAboveLevel = "difficulty_above_level";
inline constexpr const char* kFlagOutsideWordlist = "vocabulary_outside_wordlist";

/// Text is mandatory (GenerationUnavailable otherwise); an image failure
/// degrades to text-only. EmptyInput for a blank keyword.
Material generate_material(const std::string& keyword, const profile::ChildProfile& child,
                           const std::string& child_description, const characteristics::GuidelineSet& guidelines,
                           gateway::Gateway& gw, const gateway::TemplateLibrary& templates,
                           std::string material_id);

/// Tokens of `explanation` absent from every exam-level wordlist that covers
/// `lang` and applies to `child`. Common function words are ignored. Empty
/// when no such wordlist exists.
std::vector<std::string> words_outside_wordlist(const std::string& explanation, Language lang,
                                                const profile::ChildProfile& child,
                                                const characteristics::GuidelineSet& guidelines);

void to_json(Json& j, MaterialStatus s);
void from_json(const Json& j, MaterialStatus& s);
void to_json(Json& j, const Material& m);
void from_json(const Json& j, Material& m);

}  // namespace duet::materials
