#pragma once

#include "duet/gateway.hpp"
#include "duet/profile.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace duet::characteristics {

using profile::ChildProfile;
using profile::Tag;
using profile::TagCategory;

// ---------------------------------------------------------------------------
// Guidelines
// ---------------------------------------------------------------------------

enum class GuidelineKind { exam_level, preference };

/// Rule file constraining commonality reasoning. Applicability is decided from
/// profile metadata alone: age range, optional gender / proficiency filters,
/// and the languages the rule concerns (a child is covered when its native or
/// learning language is listed; an empty list covers everyone).
struct Guideline {
    std::string guideline_id;
    GuidelineKind kind = GuidelineKind::preference;
    int min_age = profile::kMinAge;
    int max_age = profile::kMaxAge;
    std::vector<Language> languages;
    std::vector<std::string> genders;
    std::vector<profile::Cefr> proficiencies;
    std::string rule_text;
    /// Exam-level wordlist, used to flag generated explanations.
    std::vector<std::string> vocabulary;

    bool operator==(const Guideline&) const = default;

    bool applies_to(const ChildProfile& child) const;
};

void to_json(Json& j, const Guideline& g);
void from_json(const Json& j, Guideline& g);

class GuidelineSet {
public:
    GuidelineSet() = default;
    explicit GuidelineSet(std::vector<Guideline> guidelines);
    /// Loads every `*.json` file in `dir`, sorted by file name.
    static GuidelineSet load_dir(const std::string& dir);

    const std::vector<Guideline>& all() const { return guidelines_; }
    const Guideline* find(std::string_view id) const;
    std::vector<Guideline> applicable_to_both(const ChildProfile& a, const ChildProfile& b) const;
    std::vector<Guideline> applicable_to(const ChildProfile& child) const;

private:
    std::vector<Guideline> guidelines_;
};

// ---------------------------------------------------------------------------
// Individual summaries
// ---------------------------------------------------------------------------

inline constexpr const char* kProficiencySource = "proficiency";

struct SummarySentence {
    std::string text;
    /// Tag values (or "proficiency") the sentence was derived from.
    std::vector<std::string> source_tags;

    bool operator==(const SummarySentence&) const = default;
};

struct IndividualSummary {
    std::string child_id;
    std::vector<SummarySentence> sentences;
    int version = 1;

    bool operator==(const IndividualSummary&) const = default;

    std::string text() const;
};

/// Gateway-backed summary. Guarantees every preference tag and the proficiency
/// are mentioned: missing facets are appended as deterministic sentences, and
/// sentences that trace to no tag are dropped. Gateway failures surface as
/// GenerationUnavailable.
IndividualSummary summarize_individual(const ChildProfile& child, gateway::Gateway& gw,
                                       const gateway::TemplateLibrary& templates);

/// Prompt-ready description of a child: the (possibly edited) summary when
/// available, otherwise the raw profile fields.
std::string describe_child(const ChildProfile& child, const IndividualSummary* summary = nullptr);

/// Nationality plus native language, used to steer cultural references.
std::string cultural_background(const ChildProfile& child);

/// Coordinator edit of one sentence; bumps the version.
IndividualSummary edit_summary(IndividualSummary summary, std::size_t index, const std::string& text);

// ---------------------------------------------------------------------------
// Matching and reasoning
// ---------------------------------------------------------------------------

struct ExactMatch {
    TagCategory category = TagCategory::PreferredTopic;
    std::string value;

    bool operator==(const ExactMatch&) const = default;
};

struct ApproximateMatch {
    std::string unified_category_label;
    /// tags[0] from the first child argument, tags[1] from the second.
    std::array<Tag, 2> tags;

    bool operator==(const ApproximateMatch&) const = default;
};

struct MatchSet {
    std::vector<ExactMatch> exact;
    std::vector<ApproximateMatch> approximate;
    bool degraded = false;

    bool operator==(const MatchSet&) const = default;
};

/// Exact pass over like-polarity tags; never calls the gateway. Dislikes are
/// excluded from matching.
std::vector<ExactMatch> exact_matches(const ChildProfile& a, const ChildProfile& b);

/// Exact matches plus one batched gateway call labelling every unmatched
/// preference pair. Profiles are ordered by child_id before prompting so the
/// result is symmetric. Gateway failure leaves approximate empty and sets degraded.
MatchSet match_tags(const ChildProfile& a, const ChildProfile& b, gateway::Gateway& gw,
                    const gateway::TemplateLibrary& templates);

struct ReasonedCommonality {
    std::string statement;
    std::string guideline_id;
    std::vector<std::string> evidence;
    /// Set for preference-guideline expansions the coordinator may veto.
    bool inferred = false;

    bool operator==(const ReasonedCommonality&) const = default;
};

struct ReasoningResult {
    std::vector<ReasonedCommonality> commonalities;
    std::vector<std::string> differences;
    bool no_applicable_guideline = false;

    bool operator==(const ReasoningResult&) const = default;
};

/// Only commonalities citing a guideline applicable to both children survive.
ReasoningResult reason_commonalities(const ChildProfile& a, const ChildProfile& b, const GuidelineSet& guidelines,
                                     gateway::Gateway& gw, const gateway::TemplateLibrary& templates);

enum class TraceSource { exact, approximate, reasoned };

struct TraceEntry {
    TraceSource source = TraceSource::exact;
    std::size_t entry = 0;
    std::size_t sentence = 0;

    bool operator==(const TraceEntry&) const = default;
};

struct CommonSummary {
    std::vector<std::string> sentences;
    MatchSet match_set;
    std::vector<ReasonedCommonality> reasoned;
    std::vector<TraceEntry> trace;
    std::vector<std::string> differences;
    bool no_applicable_guideline = false;

    bool operator==(const CommonSummary&) const = default;

    bool empty() const { return sentences.empty(); }
};

/// Deterministic: exact sentences first, approximate next, reasoned last.
CommonSummary compose_common_summary(const MatchSet& match_set, const ReasoningResult& reasoned);

/// True when every match and reasoned entry maps to at least one sentence.
bool trace_is_total(const CommonSummary& summary);

void to_json(Json& j, const SummarySentence& s);
void from_json(const Json& j, SummarySentence& s);
void to_json(Json& j, const IndividualSummary& s);
void from_json(const Json& j, IndividualSummary& s);
void to_json(Json& j, const ExactMatch& m);
void from_json(const Json& j, ExactMatch& m);
void to_json(Json& j, const ApproximateMatch& m);
void from_json(const Json& j, ApproximateMatch& m);
void to_json(Json& j, const MatchSet& m);
void from_json(const Json& j, MatchSet& m);
void to_json(Json& j, const ReasonedCommonality& r);
void from_json(const Json& j, ReasonedCommonality& r);
void to_json(Json& j, const TraceEntry& t);
void from_json(const Json& j, TraceEntry& t);
void to_json(Json& j, const CommonSummary& s);
void from_json(const Json& j, CommonSummary& s);

}  // namespace duet::characteristics
