#pragma once

#include "duet/session.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace duet::session {

struct Actor {
    std::string participant_id;
    ParticipantRole role = ParticipantRole::coordinator;

    static Actor coordinator(std::string id) { return {std::move(id), ParticipantRole::coordinator}; }
    static Actor child(std::string id) { return {std::move(id), ParticipantRole::child}; }
};

struct CommandResult {
    std::uint64_t version = 0;
    /// Absent for accepted no-ops (for example presenting a material twice).
    std::optional<Event> event;
    Json result = Json::object();
    std::string warning;
};

/// Timestamp source; receives the seq of the event being stamped.
using Clock = std::function<std::string(std::uint64_t seq)>;

/// Deterministic: one second per event from a fixed origin.
Clock logical_clock();
/// UTC wall clock, ISO-8601.
Clock wall_clock();

struct EngineContext {
    gateway::Gateway* gateway = nullptr;
    const gateway::TemplateLibrary* templates = nullptr;
    const characteristics::GuidelineSet* guidelines = nullptr;
    Clock clock = logical_clock();
};

/// Single-writer command processor for one session. Commands are serialized
/// under the writer lock; each applied command appends exactly one event.
/// Readers take immutable snapshots without touching the writer lock.
class Engine {
public:
    /// InvalidConfig when the configuration fails validation.
    static std::unique_ptr<Engine> open(std::string session_id, SessionConfig config, EngineContext context);
    static std::unique_ptr<Engine> restore(SessionState state, EngineContext context);

    std::shared_ptr<const SessionState> snapshot() const;

    /// Dispatches a named command. Errors are thrown as duet::Error and leave
    /// the session untouched.
    CommandResult execute(const Actor& actor, std::string_view command, const Json& args = Json::object());

    static const std::vector<std::string>& command_names();
    /// Commands a child credential may issue: join, submit_answer_transcript.
    static bool child_may_issue(std::string_view command);
    /// Phases in which `command` is accepted; empty for unknown commands.
    static std::vector<Phase> allowed_phases(std::string_view command);

private:
    Engine(SessionState state, EngineContext context);

    using Handler = CommandResult (Engine::*)(const Actor&, const Json&);
    static const std::map<std::string, Handler, std::less<>>& handlers();

    CommandResult emit(const Actor& actor, std::string kind, Json payload, Visibility visibility,
                       Json result = Json::object());
    void publish();

    gateway::Gateway& gw() const;
    const gateway::TemplateLibrary& templates() const;
    std::string describe(const std::string& child_id) const;

    CommandResult cmd_join(const Actor&, const Json&);
    CommandResult cmd_upsert_profile(const Actor&, const Json&);
    CommandResult cmd_set_target_words(const Actor&, const Json&);
    CommandResult cmd_summarize_child(const Actor&, const Json&);
    CommandResult cmd_edit_summary(const Actor&, const Json&);
    CommandResult cmd_summarize_common(const Actor&, const Json&);
    CommandResult cmd_advance_phase(const Actor&, const Json&);
    CommandResult cmd_generate_framework(const Actor&, const Json&);
    CommandResult cmd_regenerate_framework(const Actor&, const Json&);
    CommandResult cmd_edit_paragraph(const Actor&, const Json&);
    CommandResult cmd_confirm_framework(const Actor&, const Json&);
    CommandResult cmd_generate_cloze_questions(const Actor&, const Json&);
    CommandResult cmd_generate_adaptation_questions(const Actor&, const Json&);
    CommandResult cmd_generate_extension_questions(const Actor&, const Json&);
    CommandResult cmd_ask_question(const Actor&, const Json&);
    CommandResult cmd_select_question(const Actor&, const Json&);
    CommandResult cmd_skip_question(const Actor&, const Json&);
    CommandResult cmd_submit_answer_transcript(const Actor&, const Json&);
    CommandResult cmd_code_response(const Actor&, const Json&);
    CommandResult cmd_suggest_codes(const Actor&, const Json&);
    CommandResult cmd_fill_blank(const Actor&, const Json&);
    CommandResult cmd_adapt_paragraph(const Actor&, const Json&);
    CommandResult cmd_append_extension(const Actor&, const Json&);
    CommandResult cmd_rotate_roles(const Actor&, const Json&);
    CommandResult cmd_generate_material(const Actor&, const Json&);
    CommandResult cmd_present_material(const Actor&, const Json&);
    CommandResult cmd_build_report(const Actor&, const Json&);
    CommandResult cmd_approve_feedback(const Actor&, const Json&);

    CommandResult store_questions(const Actor& actor, std::vector<questions::GeneratedQuestion> qs, Json extra);
    CommandResult framework_draft(const Actor& actor);

    EngineContext context_;
    mutable std::mutex writer_;
    SessionState state_;
    mutable std::mutex publish_mutex_;
    std::shared_ptr<const SessionState> published_;
};

}  // namespace duet::session
