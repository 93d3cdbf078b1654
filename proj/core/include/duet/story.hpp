#pragma once

#include "duet/characteristics.hpp"
#include "duet/gateway.hpp"
#include "duet/profile.hpp"
#include "duet/text.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace duet::story {

using profile::SessionConfig;
using profile::TargetWordSet;

enum class Stage { exposition, rising_action, climax, falling_action, resolution };

const std::array<Stage, 5>& all_stages();
std::string_view to_string(Stage s);
Stage stage_from_string(std::string_view name);

enum class AuthorKind { generated, coordinator_edit, child_extension };

struct Author {
    AuthorKind kind = AuthorKind::generated;
    std::string child_id;  // set for child_extension only

    bool operator==(const Author&) const = default;
};

struct Paragraph {
    int index = 0;
    Language language = Language::zh;
    std::string text;
    Author author;

    bool operator==(const Paragraph&) const = default;
};

/// Inclusive paragraph range attributed to one narrative stage.
struct StageRange {
    Stage stage = Stage::exposition;
    int first = 0;
    int last = 0;

    bool operator==(const StageRange&) const = default;
};

enum class FrameworkStatus { draft, confirmed };

struct StoryFramework {
    std::string framework_id;
    int revision = 1;
    std::vector<Paragraph> paragraphs;
    FrameworkStatus status = FrameworkStatus::draft;
    std::vector<StageRange> narrative_stages;

    bool operator==(const StoryFramework&) const = default;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationIssue {
    /// One of: paragraph_count, empty_text, first_language, alternation,
    /// missing_word, stage_coverage, stage_order.
    std::string code;
    std::string message;
    std::optional<int> paragraph;
    std::string word;

    bool operator==(const ValidationIssue&) const = default;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool operator==(const ValidationReport&) const = default;

    bool ok() const { return issues.empty(); }
    std::vector<std::string> missing_words() const;
};

ValidationReport validate_framework(const StoryFramework& framework, const TargetWordSet& words,
                                    Language first_paragraph_language);

/// Alternation over any paragraph list (frameworks and storybooks alike).
bool alternates(const std::vector<Paragraph>& paragraphs);

// ---------------------------------------------------------------------------
// Generation and drafting
// ---------------------------------------------------------------------------

/// True when the common summary offers nothing to build a premise from.
bool is_generic_premise(const characteristics::CommonSummary& common);

gateway::RenderedPrompt build_story_prompt(const characteristics::CommonSummary& common, const TargetWordSet& words,
                                           const SessionConfig& config, const gateway::TemplateLibrary& templates);

/// Output schema the gateway validates story replies against.
const Json& story_output_schema();

/// Turns a schema-valid gateway reply into a draft. Unknown language or stage
/// names are MalformedOutput.
StoryFramework parse_framework(const Json& reply, std::string framework_id);

struct FrameworkDraft {
    StoryFramework framework;
    ValidationReport report;
    std::string correlation_id;
};

/// One gateway call; validation problems are reported, not thrown, so the
/// coordinator can repair the draft.
FrameworkDraft generate_framework(const gateway::RenderedPrompt& prompt, gateway::Gateway& gw,
                                  const TargetWordSet& words, Language first_paragraph_language,
                                  std::string framework_id);

/// Draft-only. WrongStatus, OutOfRange, EmptyInput.
StoryFramework edit_paragraph(StoryFramework framework, int index, const std::string& new_text);

/// WrongStatus unless draft; ValidationFailed (details = report) unless valid.
StoryFramework confirm_framework(StoryFramework framework, const TargetWordSet& words,
                                 Language first_paragraph_language);

// ---------------------------------------------------------------------------
// Cloze
// ---------------------------------------------------------------------------

struct BlankFill {
    std::string answer_text;
    std::string filled_by;
    bool approved = false;

    bool operator==(const BlankFill&) const = default;
};

struct Blank {
    int blank_index = 0;  // 1-based display number, document order
    int paragraph_index = 0;
    text::Span char_span;  // byte offsets into the confirmed paragraph text
    std::string target_word;
    Language language = Language::zh;
    std::string assigned_child;
    std::optional<BlankFill> fill;

    bool operator==(const Blank&) const = default;
};

enum class ClozeStatus { open, completed };

struct ClozeStory {
    StoryFramework base;
    std::vector<Blank> blanks;
    ClozeStatus status = ClozeStatus::open;

    bool operator==(const ClozeStory&) const = default;

    const Blank& blank(int blank_index) const;
    std::vector<const Blank*> blanks_of(const std::string& child_id) const;
};

/// Places one blank per target word at its first occurrence in a paragraph of
/// the word's language. Longer words claim their spans first; a word whose
/// first occurrence overlaps an earlier claim takes its next free occurrence.
/// Returns the words that could not be placed in `unplaced` when non-null,
/// otherwise throws WordNotFound.
std::vector<Blank> plan_blanks(const std::vector<Paragraph>& paragraphs, const TargetWordSet& words,
                               std::vector<std::string>* unplaced = nullptr);

/// WrongStatus unless the framework is confirmed.
ClozeStory to_cloze(const StoryFramework& confirmed, const TargetWordSet& words);

/// Alternates assignment in blank order, starting with the child learning the
/// language of blank 1's paragraph.
ClozeStory assign_blanks(ClozeStory cloze, const SessionConfig& config);

/// UnknownBlank, AlreadyFilled (once approved), EmptyInput.
ClozeStory fill_blank(ClozeStory cloze, int blank_index, const std::string& answer_text, const std::string& filled_by,
                      bool approved);

/// Paragraph text with filled blanks replaced by their answers and open ones
/// rendered as "(n)____".
std::string render_cloze_paragraph(const ClozeStory& cloze, int paragraph_index);

/// Paragraph texts with every filled blank substituted (approved or not).
std::vector<Paragraph> reconstruct(const ClozeStory& cloze);

// ---------------------------------------------------------------------------
// Storybook
// ---------------------------------------------------------------------------

enum class EditKind { fill, adapt, extend };

struct ProvenanceEntry {
    EditKind kind = EditKind::fill;
    int paragraph_index = 0;
    std::string text;
    text::Span span;           // fill only
    int blank_index = 0;       // fill only
    std::string rationale;     // adapt only
    std::string child_id;      // fill (filled_by) and extend
    std::string utterance_id;  // extend only
    std::optional<Language> language;  // extend only

    bool operator==(const ProvenanceEntry&) const = default;
};

struct Storybook {
    std::vector<Paragraph> base;
    std::vector<Paragraph> paragraphs;
    std::vector<ProvenanceEntry> provenance;

    bool operator==(const Storybook&) const = default;
};

/// Starts from the confirmed framework and logs one fill entry per blank.
Storybook storybook_from_cloze(const ClozeStory& cloze);

/// Replaces one paragraph's text; the language is fixed. OutOfRange, EmptyInput.
Storybook apply_adaptation_edit(Storybook book, int paragraph_index, const std::string& new_text,
                                const std::string& rationale);

/// Appends a paragraph in `language`; AlternationViolation if it matches the
/// previous paragraph's language.
Storybook append_extension(Storybook book, const std::string& child_id, Language language, const std::string& text,
                           const std::string& utterance_id);

/// Rebuilds paragraphs by replaying `provenance` over `base`.
std::vector<Paragraph> replay_provenance(const std::vector<Paragraph>& base,
                                         const std::vector<ProvenanceEntry>& provenance);

std::string storybook_plain_text(const Storybook& book);

void to_json(Json& j, Stage s);
void from_json(const Json& j, Stage& s);
void to_json(Json& j, const Author& a);
void from_json(const Json& j, Author& a);
void to_json(Json& j, const Paragraph& p);
void from_json(const Json& j, Paragraph& p);
void to_json(Json& j, const StageRange& r);
void from_json(const Json& j, StageRange& r);
void to_json(Json& j, const StoryFramework& f);
void from_json(const Json& j, StoryFramework& f);
void to_json(Json& j, const ValidationIssue& i);
void from_json(const Json& j, ValidationIssue& i);
void to_json(Json& j, const ValidationReport& r);
void from_json(const Json& j, ValidationReport& r);
void to_json(Json& j, const BlankFill& f);
void from_json(const Json& j, BlankFill& f);
void to_json(Json& j, const Blank& b);
void from_json(const Json& j, Blank& b);
void to_json(Json& j, const ClozeStory& c);
void from_json(const Json& j, ClozeStory& c);
void to_json(Json& j, const ProvenanceEntry& e);
void from_json(const Json& j, ProvenanceEntry& e);
void to_json(Json& j, const Storybook& b);
void from_json(const Json& j, Storybook& b);

}  // namespace duet::story
