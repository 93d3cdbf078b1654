#pragma once

#include "duet/analytics.hpp"
#include "duet/characteristics.hpp"
#include "duet/materials.hpp"
#include "duet/profile.hpp"
#include "duet/questions.hpp"
#include "duet/story.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace duet::session {

using profile::SessionConfig;

enum class Phase { Preparation, Framework, Cloze, Adaptation, Extension, Review };

const std::vector<Phase>& all_phases();
std::string_view to_string(Phase p);
Phase phase_from_string(std::string_view name);
std::optional<Phase> successor(Phase p);

enum class Visibility { coordinator_only, all };
std::string_view to_string(Visibility v);

enum class ParticipantRole { coordinator, child };
std::string_view to_string(ParticipantRole r);
ParticipantRole participant_role_from_string(std::string_view name);

struct RoleAssignment {
    std::string storyteller;
    std::string storylistener;
    int round = 0;

    bool operator==(const RoleAssignment&) const = default;
};

struct OverrideRecord {
    std::string question_id;
    std::string child_id;
    /// Who the allocator would have picked.
    std::string expected_child;

    bool operator==(const OverrideRecord&) const = default;
};

struct TurnLedger {
    std::map<std::string, int> questions_selected;
    std::vector<OverrideRecord> overrides;
    std::map<std::string, int> blanks_assigned;
    /// Child of the most recent selection; empty before the first one.
    std::string last_selected;

    bool operator==(const TurnLedger&) const = default;
};

struct Event {
    std::uint64_t seq = 0;
    std::string timestamp;
    std::string kind;
    Json payload;
    Visibility visibility = Visibility::all;
    std::string actor;

    bool operator==(const Event&) const = default;
};

/// Wire frame: {seq, kind, payload, visibility}.
Json to_frame(const Event& e);

struct Utterance {
    std::string utterance_id;
    std::string child_id;
    std::string text;
    int round = 0;

    bool operator==(const Utterance&) const = default;
};

struct SessionState {
    std::string session_id;
    Phase phase = Phase::Preparation;
    SessionConfig config;
    std::optional<RoleAssignment> roles;
    TurnLedger ledger;
    std::vector<Event> event_log;
    std::uint64_t version = 0;

    std::map<std::string, ParticipantRole> joined;
    std::map<std::string, characteristics::IndividualSummary> summaries;
    std::optional<characteristics::CommonSummary> common;
    std::optional<story::StoryFramework> framework;
    std::optional<story::ValidationReport> framework_report;
    int frameworks_generated = 0;
    std::optional<story::ClozeStory> cloze;
    std::optional<story::Storybook> storybook;
    std::vector<questions::GeneratedQuestion> questions;
    std::vector<analytics::ResponseRecord> records;
    std::vector<materials::Material> materials;
    std::vector<Utterance> utterances;
    /// Storyteller has appended during the current round.
    bool contributed_this_round = false;
    /// Completed-or-current storyteller turns per child.
    std::map<std::string, int> teller_turns;
    std::optional<std::string> shared_question;
    std::optional<analytics::EngagementReport> report;

    bool operator==(const SessionState&) const = default;

    const questions::GeneratedQuestion& question(std::string_view id) const;
    const analytics::ResponseRecord& record(std::string_view id) const;
    const materials::Material& material(std::string_view id) const;
    bool is_participant(std::string_view id) const;
    const characteristics::IndividualSummary* summary_of(std::string_view child_id) const;
};

/// Allocation policy; only absolute fairness is implemented.
class RespondentPolicy {
public:
    virtual ~RespondentPolicy() = default;
    virtual std::string next(const TurnLedger& ledger, const std::vector<std::string>& children,
                             const std::string& fresh_default) const = 0;
};

/// Lower questions_selected wins; ties go to the child not selected most
/// recently; with no history, `fresh_default`.
class AbsoluteFairness final : public RespondentPolicy {
public:
    std::string next(const TurnLedger& ledger, const std::vector<std::string>& children,
                     const std::string& fresh_default) const override;
};

/// Pure query over the session state using absolute fairness.
std::string next_respondent(const SessionState& state);

/// Child assigned blank 1, or the learner of the first paragraph language
/// before the cloze exists.
std::string fresh_respondent(const SessionState& state);

/// Pure reducer. Events are trusted; they were validated when produced.
void apply(SessionState& state, const Event& event);

/// Folds the log from an empty state.
SessionState replay(const std::vector<Event>& events);

void to_json(Json& j, Phase p);
void from_json(const Json& j, Phase& p);
void to_json(Json& j, Visibility v);
void from_json(const Json& j, Visibility& v);
void to_json(Json& j, ParticipantRole r);
void from_json(const Json& j, ParticipantRole& r);
void to_json(Json& j, const RoleAssignment& r);
void from_json(const Json& j, RoleAssignment& r);
void to_json(Json& j, const OverrideRecord& o);
void from_json(const Json& j, OverrideRecord& o);
void to_json(Json& j, const TurnLedger& l);
void from_json(const Json& j, TurnLedger& l);
void to_json(Json& j, const Event& e);
void from_json(const Json& j, Event& e);
void to_json(Json& j, const Utterance& u);
void from_json(const Json& j, Utterance& u);
void to_json(Json& j, const SessionState& s);
void from_json(const Json& j, SessionState& s);

}  // namespace duet::session
