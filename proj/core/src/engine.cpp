#include "duet/engine.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>

namespace duet::session {

namespace {

std::string format_utc(std::time_t t) {
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

constexpr std::time_t kLogicalOrigin = 1704067200;  // 2024-01-01T00:00:00Z

using P = Phase;

struct CommandInfo {
    std::vector<Phase> phases;
    bool child_allowed = false;
};

const std::map<std::string, CommandInfo, std::less<>>& command_table() {
    static const std::vector<Phase> any = all_phases();
    static const std::vector<Phase> live = {P::Cloze, P::Adaptation, P::Extension};
    static const std::map<std::string, CommandInfo, std::less<>> table = {
        {"join", {any, true}},
        {"upsert_profile", {{P::Preparation, P::Review}}},
        {"set_target_words", {{P::Preparation}}},
        {"summarize_child", {{P::Preparation}}},
        {"edit_summary", {{P::Preparation}}},
        {"summarize_common", {{P::Preparation}}},
        {"advance_phase", {any}},
        {"generate_framework", {{P::Framework}}},
        {"regenerate_framework", {{P::Framework}}},
        {"edit_paragraph", {{P::Framework}}},
        {"confirm_framework", {{P::Framework}}},
        {"generate_cloze_questions", {{P::Cloze}}},
        {"generate_adaptation_questions", {{P::Adaptation}}},
        {"generate_extension_questions", {{P::Extension}}},
        {"ask_question", {live}},
        {"select_question", {live}},
        {"skip_question", {live}},
        {"submit_answer_transcript", {live, true}},
        {"code_response", {{P::Cloze, P::Adaptation, P::Extension, P::Review}}},
        {"suggest_codes", {{P::Cloze, P::Adaptation, P::Extension, P::Review}}},
        {"fill_blank", {{P::Cloze}}},
        {"adapt_paragraph", {{P::Adaptation}}},
        {"append_extension", {{P::Extension}}},
        {"rotate_roles", {{P::Extension}}},
        {"generate_material", {{P::Framework, P::Cloze, P::Adaptation, P::Extension}}},
        {"present_material", {{P::Framework, P::Cloze, P::Adaptation, P::Extension}}},
        {"build_report", {{P::Review}}},
        {"approve_feedback", {{P::Review}}},
    };
    return table;
}

Phase stage_phase(questions::QuestionStage stage) {
    switch (stage) {
        case questions::QuestionStage::cloze: return Phase::Cloze;
        case questions::QuestionStage::adaptation: return Phase::Adaptation;
        default: return Phase::Extension;
    }
}

std::string phase_list(const std::vector<Phase>& phases) {
    std::string out;
    for (auto p : phases) out += (out.empty() ? "" : ", ") + std::string(to_string(p));
    return out;
}

}  // namespace

Clock logical_clock() {
    return [](std::uint64_t seq) { return format_utc(kLogicalOrigin + static_cast<std::time_t>(seq)); };
}

Clock wall_clock() {
    return [](std::uint64_t) {
        return format_utc(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now()));
    };
}

// ---------------------------------------------------------------------------

Engine::Engine(SessionState state, EngineContext context) : context_(std::move(context)), state_(std::move(state)) {
    if (!context_.clock) context_.clock = logical_clock();
    publish();
}

std::unique_ptr<Engine> Engine::open(std::string session_id, SessionConfig config, EngineContext context) {
    profile::validate_config(config);
    std::unique_ptr<Engine> engine(new Engine(SessionState{}, std::move(context)));
    std::lock_guard lock(engine->writer_);
    const Actor actor = Actor::coordinator(config.coordinator_id);
    engine->emit(actor, "session_opened", Json{{"session_id", std::move(session_id)}, {"config", config}},
                 Visibility::coordinator_only);
    return engine;
}

std::unique_ptr<Engine> Engine::restore(SessionState state, EngineContext context) {
    return std::unique_ptr<Engine>(new Engine(std::move(state), std::move(context)));
}

std::shared_ptr<const SessionState> Engine::snapshot() const {
    std::lock_guard lock(publish_mutex_);
    return published_;
}

void Engine::publish() {
    auto copy = std::make_shared<const SessionState>(state_);
    std::lock_guard lock(publish_mutex_);
    published_ = std::move(copy);
}

const std::vector<std::string>& Engine::command_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, info] : command_table()) out.push_back(name);
        return out;
    }();
    return names;
}

bool Engine::child_may_issue(std::string_view command) {
    auto it = command_table().find(command);
    return it != command_table().end() && it->second.child_allowed;
}

std::vector<Phase> Engine::allowed_phases(std::string_view command) {
    auto it = command_table().find(command);
    return it == command_table().end() ? std::vector<Phase>{} : it->second.phases;
}

const std::map<std::string, Engine::Handler, std::less<>>& Engine::handlers() {
    static const std::map<std::string, Handler, std::less<>> table = {
        {"join", &Engine::cmd_join},
        {"upsert_profile", &Engine::cmd_upsert_profile},
        {"set_target_words", &Engine::cmd_set_target_words},
        {"summarize_child", &Engine::cmd_summarize_child},
        {"edit_summary", &Engine::cmd_edit_summary},
        {"summarize_common", &Engine::cmd_summarize_common},
        {"advance_phase", &Engine::cmd_advance_phase},
        {"generate_framework", &Engine::cmd_generate_framework},
        {"regenerate_framework", &Engine::cmd_regenerate_framework},
        {"edit_paragraph", &Engine::cmd_edit_paragraph},
        {"confirm_framework", &Engine::cmd_confirm_framework},
        {"generate_cloze_questions", &Engine::cmd_generate_cloze_questions},
        {"generate_adaptation_questions", &Engine::cmd_generate_adaptation_questions},
        {"generate_extension_questions", &Engine::cmd_generate_extension_questions},
        {"ask_question", &Engine::cmd_ask_question},
        {"select_question", &Engine::cmd_select_question},
        {"skip_question", &Engine::cmd_skip_question},
        {"submit_answer_transcript", &Engine::cmd_submit_answer_transcript},
        {"code_response", &Engine::cmd_code_response},
        {"suggest_codes", &Engine::cmd_suggest_codes},
        {"fill_blank", &Engine::cmd_fill_blank},
        {"adapt_paragraph", &Engine::cmd_adapt_paragraph},
        {"append_extension", &Engine::cmd_append_extension},
        {"rotate_roles", &Engine::cmd_rotate_roles},
        {"generate_material", &Engine::cmd_generate_material},
        {"present_material", &Engine::cmd_present_material},
        {"build_report", &Engine::cmd_build_report},
        {"approve_feedback", &Engine::cmd_approve_feedback},
    };
    return table;
}

CommandResult Engine::execute(const Actor& actor, std::string_view command, const Json& args_in) {
    const auto info = command_table().find(command);
    if (info == command_table().end()) throw Error(ErrorCode::UnknownCommand, "unknown command '" + std::string(command) + "'");
    const Json args = args_in.is_null() ? Json::object() : args_in;
    if (!args.is_object()) throw Error(ErrorCode::BadArguments, "command arguments must be an object");

    std::lock_guard lock(writer_);
    if (!state_.is_participant(actor.participant_id)) {
        throw Error(ErrorCode::UnknownParticipant, "'" + actor.participant_id + "' is not part of this session");
    }
    const bool is_child = state_.config.has_child(actor.participant_id);
    if ((actor.role == ParticipantRole::child) != is_child) {
        throw Error(ErrorCode::Unauthorized, "credential role does not match participant '" + actor.participant_id + "'");
    }
    if (actor.role == ParticipantRole::child && !info->second.child_allowed) {
        throw Error(ErrorCode::Unauthorized, "children may not issue '" + std::string(command) + "'");
    }
    const auto& phases = info->second.phases;
    if (std::find(phases.begin(), phases.end(), state_.phase) == phases.end()) {
        throw Error(ErrorCode::WrongPhase, "'" + std::string(command) + "' is accepted in " + phase_list(phases) +
                                               ", not " + std::string(to_string(state_.phase)));
    }
    const Handler handler = handlers().at(std::string(command));
    return (this->*handler)(actor, args);
}

CommandResult Engine::emit(const Actor& actor, std::string kind, Json payload, Visibility visibility, Json result) {
    Event e;
    e.seq = state_.version + 1;
    e.timestamp = context_.clock(e.seq);
    e.kind = std::move(kind);
    e.payload = std::move(payload);
    e.visibility = visibility;
    e.actor = actor.participant_id;
    apply(state_, e);
    publish();
    CommandResult r;
    r.version = state_.version;
    r.event = std::move(e);
    r.result = std::move(result);
    return r;
}

gateway::Gateway& Engine::gw() const {
    if (!context_.gateway) throw Error(ErrorCode::GenerationUnavailable, "no generation gateway configured");
    return *context_.gateway;
}

const gateway::TemplateLibrary& Engine::templates() const {
    if (!context_.templates) throw Error(ErrorCode::GenerationUnavailable, "no template library configured");
    return *context_.templates;
}

std::string Engine::describe(const std::string& child_id) const {
    return characteristics::describe_child(state_.config.child(child_id), state_.summary_of(child_id));
}

// ---------------------------------------------------------------------------
// Preparation

CommandResult Engine::cmd_join(const Actor& actor, const Json& args) {
    std::string id = optional_field<std::string>(args, "participant_id", actor.participant_id);
    if (actor.role == ParticipantRole::child && id != actor.participant_id) {
        throw Error(ErrorCode::Unauthorized, "a child may only join as themselves");
    }
    if (!state_.is_participant(id)) throw Error(ErrorCode::UnknownParticipant, "'" + id + "' is not listed in the session");
    const auto role = state_.config.has_child(id) ? ParticipantRole::child : ParticipantRole::coordinator;
    return emit(actor, "participant_joined", Json{{"participant_id", id}, {"role", role}}, Visibility::all);
}

CommandResult Engine::cmd_upsert_profile(const Actor& actor, const Json& args) {
    auto p = required_field<profile::ChildProfile>(args, "profile");
    if (!state_.config.has_child(p.child_id)) {
        throw Error(ErrorCode::UnknownParticipant, "'" + p.child_id + "' is not a child in this session");
    }
    profile::validate_profile(p);
    SessionConfig trial = state_.config;
    trial.child(p.child_id) = p;
    profile::validate_config(trial);
    return emit(actor, "profile_upserted", Json{{"profile", p}}, Visibility::coordinator_only);
}

CommandResult Engine::cmd_set_target_words(const Actor& actor, const Json& args) {
    const Json& raw = args.contains("words_by_language") ? args.at("words_by_language") : args;
    std::map<Language, std::vector<std::string>> words;
    try {
        for (const auto& [lang, list] : raw.items()) {
            words[language_from_string(lang)] = list.get<std::vector<std::string>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadArguments, std::string("target words: ") + e.what());
    }
    const auto set = profile::make_target_words(std::move(words));
    return emit(actor, "target_words_set", Json{{"target_words", set}}, Visibility::coordinator_only);
}

CommandResult Engine::cmd_summarize_child(const Actor& actor, const Json& args) {
    const auto id = required_field<std::string>(args, "child_id");
    if (!state_.config.has_child(id)) throw Error(ErrorCode::UnknownParticipant, "'" + id + "' is not a child here");
    auto summary = characteristics::summarize_individual(state_.config.child(id), gw(), templates());
    Json result{{"summary", summary}};
    return emit(actor, "individual_summarized", Json{{"summary", std::move(summary)}}, Visibility::coordinator_only,
                std::move(result));
}

CommandResult Engine::cmd_edit_summary(const Actor& actor, const Json& args) {
    const auto id = required_field<std::string>(args, "child_id");
    const auto* current = state_.summary_of(id);
    if (!current) throw Error(ErrorCode::GuardFailed, "no summary for '" + id + "' yet");
    auto edited = characteristics::edit_summary(*current, required_field<std::size_t>(args, "index"),
                                                required_field<std::string>(args, "text"));
    return emit(actor, "summary_edited", Json{{"summary", std::move(edited)}}, Visibility::coordinator_only);
}

CommandResult Engine::cmd_summarize_common(const Actor& actor, const Json&) {
    const auto& a = state_.config.children.at(0);
    const auto& b = state_.config.children.at(1);
    static const characteristics::GuidelineSet no_guidelines;
    const auto& guidelines = context_.guidelines ? *context_.guidelines : no_guidelines;
    auto matches = characteristics::match_tags(a, b, gw(), templates());
    auto reasoned = characteristics::reason_commonalities(a, b, guidelines, gw(), templates());
    auto common = characteristics::compose_common_summary(matches, reasoned);
    Json result{{"sentences", common.sentences},
                {"degraded", common.match_set.degraded},
                {"no_applicable_guideline", common.no_applicable_guideline}};
    return emit(actor, "common_summarized", Json{{"common", std::move(common)}}, Visibility::coordinator_only,
                std::move(result));
}

// ---------------------------------------------------------------------------
// Phases

CommandResult Engine::cmd_advance_phase(const Actor& actor, const Json& args) {
    const Phase target = phase_from_string(required_field<std::string>(args, "to"));
    const auto next = successor(state_.phase);
    if (!next || *next != target) {
        throw Error(ErrorCode::IllegalTransition,
                    std::string(to_string(state_.phase)) + " -> " + std::string(to_string(target)));
    }
    Json payload{{"from", state_.phase}, {"to", target}};
    switch (target) {
        case Phase::Framework:
            if (state_.config.target_words.empty()) throw Error(ErrorCode::GuardFailed, "target words not set");
            if (!state_.common) throw Error(ErrorCode::GuardFailed, "common summary not composed");
            break;
        case Phase::Cloze: {
            if (!state_.framework || state_.framework->status != story::FrameworkStatus::confirmed) {
                throw Error(ErrorCode::GuardFailed, "framework not confirmed");
            }
            Json paragraphs = Json::array();
            for (const auto& p : state_.cloze->base.paragraphs) {
                paragraphs.push_back({{"index", p.index},
                                      {"language", p.language},
                                      {"text", story::render_cloze_paragraph(*state_.cloze, p.index)}});
            }
            Json blanks = Json::array();
            for (const auto& b : state_.cloze->blanks) {
                blanks.push_back({{"blank_index", b.blank_index},
                                  {"paragraph_index", b.paragraph_index},
                                  {"assigned_child", b.assigned_child},
                                  {"display_name", state_.config.child(b.assigned_child).display_name}});
            }
            payload["cloze_view"] = {{"paragraphs", paragraphs}, {"blanks", blanks}};
            break;
        }
        case Phase::Adaptation:
            if (!state_.cloze || state_.cloze->status != story::ClozeStatus::completed) {
                throw Error(ErrorCode::GuardFailed, "cloze not completed");
            }
            payload["paragraphs"] = story::reconstruct(*state_.cloze);
            break;
        case Phase::Extension: {
            const std::string teller = optional_field<std::string>(args, "first_teller", fresh_respondent(state_));
            if (!state_.config.has_child(teller)) {
                throw Error(ErrorCode::UnknownParticipant, "'" + teller + "' is not a child here");
            }
            payload["roles"] = RoleAssignment{teller, state_.config.other_child(teller).child_id, 0};
            break;
        }
        default:
            break;
    }
    return emit(actor, "phase_advanced", std::move(payload), Visibility::all);
}

// ---------------------------------------------------------------------------
// Framework

CommandResult Engine::framework_draft(const Actor& actor) {
    if (!state_.common) throw Error(ErrorCode::GuardFailed, "common summary not composed");
    const auto prompt =
        story::build_story_prompt(*state_.common, state_.config.target_words, state_.config, templates());
    auto draft = story::generate_framework(prompt, gw(), state_.config.target_words,
                                           state_.config.first_paragraph_language,
                                           "f" + std::to_string(state_.frameworks_generated + 1));
    Json payload{{"framework", draft.framework},
                 {"report", draft.report},
                 {"generic_premise", story::is_generic_premise(*state_.common)},
                 {"correlation_id", draft.correlation_id}};
    Json result{{"framework_id", draft.framework.framework_id}, {"report", draft.report}};
    return emit(actor, "framework_generated", std::move(payload), Visibility::coordinator_only, std::move(result));
}

CommandResult Engine::cmd_generate_framework(const Actor& actor, const Json&) {
    if (state_.framework && state_.framework->status == story::FrameworkStatus::confirmed) {
        throw Error(ErrorCode::WrongStatus, "framework is already confirmed");
    }
    return framework_draft(actor);
}

CommandResult Engine::cmd_regenerate_framework(const Actor& actor, const Json&) {
    if (!state_.framework) throw Error(ErrorCode::WrongStatus, "no draft to regenerate");
    if (state_.framework->status != story::FrameworkStatus::draft) {
        throw Error(ErrorCode::WrongStatus, "framework is already confirmed");
    }
    return framework_draft(actor);
}

CommandResult Engine::cmd_edit_paragraph(const Actor& actor, const Json& args) {
    if (!state_.framework) throw Error(ErrorCode::WrongStatus, "no draft to edit");
    auto fw = story::edit_paragraph(*state_.framework, required_field<int>(args, "index"),
                                    required_field<std::string>(args, "text"));
    auto report = story::validate_framework(fw, state_.config.target_words, state_.config.first_paragraph_language);
    Json result{{"report", report}};
    return emit(actor, "framework_edited", Json{{"framework", std::move(fw)}, {"report", std::move(report)}},
                Visibility::coordinator_only, std::move(result));
}

CommandResult Engine::cmd_confirm_framework(const Actor& actor, const Json&) {
    if (!state_.framework) throw Error(ErrorCode::WrongStatus, "no draft to confirm");
    auto fw = story::confirm_framework(*state_.framework, state_.config.target_words,
                                       state_.config.first_paragraph_language);
    auto cloze = story::assign_blanks(story::to_cloze(fw, state_.config.target_words), state_.config);
    Json result{{"blanks", cloze.blanks.size()}};
    return emit(actor, "framework_confirmed", Json{{"framework", std::move(fw)}, {"cloze", std::move(cloze)}},
                Visibility::coordinator_only, std::move(result));
}

// ---------------------------------------------------------------------------
// Questions

CommandResult Engine::store_questions(const Actor& actor, std::vector<questions::GeneratedQuestion> qs, Json extra) {
    std::size_t next = state_.questions.size();
    Json ids = Json::array();
    for (auto& q : qs) {
        q.question_id = "q" + std::to_string(++next);
        ids.push_back(q.question_id);
    }
    Json payload = std::move(extra);
    payload["questions"] = qs;
    return emit(actor, "questions_generated", std::move(payload), Visibility::coordinator_only,
                Json{{"question_ids", ids}});
}

CommandResult Engine::cmd_generate_cloze_questions(const Actor& actor, const Json& args) {
    const int index = required_field<int>(args, "blank_index");
    const auto& blank = state_.cloze->blank(index);
    if (blank.fill && blank.fill->approved) {
        throw Error(ErrorCode::AlreadyFilled, "blank (" + std::to_string(index) + ") is already filled");
    }
    const auto& child = state_.config.child(blank.assigned_child);
    auto qs = questions::generate_cloze_questions(*state_.cloze, index, child, describe(child.child_id), gw(),
                                                  templates());
    return store_questions(actor, std::move(qs), Json{{"stage", "cloze"}, {"blank_index", index}});
}

CommandResult Engine::cmd_generate_adaptation_questions(const Actor& actor, const Json& args) {
    const int index = required_field<int>(args, "paragraph_index");
    const auto child_id = optional_field<std::string>(args, "child_id", next_respondent(state_));
    if (!state_.config.has_child(child_id)) throw Error(ErrorCode::UnknownParticipant, "'" + child_id + "' is not a child here");
    auto qs = questions::generate_adaptation_questions(state_.storybook->paragraphs, index,
                                                       state_.config.child(child_id), describe(child_id), gw(),
                                                       templates());
    return store_questions(actor, std::move(qs), Json{{"stage", "adaptation"}, {"paragraph_index", index}});
}

CommandResult Engine::cmd_generate_extension_questions(const Actor& actor, const Json& args) {
    if (state_.utterances.empty()) throw Error(ErrorCode::NoContributionYet, "no extension utterance yet");
    const auto id = optional_field<std::string>(args, "utterance_id", state_.utterances.back().utterance_id);
    const auto it = std::find_if(state_.utterances.begin(), state_.utterances.end(),
                                 [&](const Utterance& u) { return u.utterance_id == id; });
    if (it == state_.utterances.end()) throw Error(ErrorCode::BadArguments, "unknown utterance '" + id + "'");
    const auto& teller = state_.config.child(it->child_id);
    const auto& listener = state_.config.other_child(it->child_id);
    auto ext = questions::generate_extension_questions(state_.storybook->paragraphs, it->text, id, teller,
                                                       describe(teller.child_id), listener,
                                                       describe(listener.child_id), gw(), templates());
    std::vector<questions::GeneratedQuestion> all = std::move(ext.teller);
    all.insert(all.end(), ext.listener.begin(), ext.listener.end());
    return store_questions(actor, std::move(all), Json{{"stage", "extension"}, {"utterance_id", id}});
}

CommandResult Engine::cmd_ask_question(const Actor& actor, const Json& args) {
    const auto child_id = required_field<std::string>(args, "child_id");
    if (!state_.config.has_child(child_id)) throw Error(ErrorCode::UnknownParticipant, "'" + child_id + "' is not a child here");
    const std::string text_value = text::collapse_whitespace(required_field<std::string>(args, "text"));
    if (text_value.empty()) throw Error(ErrorCode::EmptyInput, "question text is blank");

    questions::GeneratedQuestion q;
    q.text = text_value;
    q.coordinator_authored = true;
    q.language = state_.config.child(child_id).learning_language;
    q.spec.target_child = child_id;
    q.spec.attribute = questions::attribute_from_string(required_field<std::string>(args, "attribute"));
    q.spec.explicitness = questions::explicitness_from_string(optional_field<std::string>(args, "explicitness", "explicit"));
    switch (state_.phase) {
        case Phase::Cloze:
            q.spec.stage = questions::QuestionStage::cloze;
            q.spec.anchor = {questions::AnchorKind::blank, state_.cloze->blank(required_field<int>(args, "blank_index")).blank_index, {}};
            break;
        case Phase::Adaptation: {
            const int index = required_field<int>(args, "paragraph_index");
            if (index < 0 || index >= static_cast<int>(state_.storybook->paragraphs.size())) {
                throw Error(ErrorCode::OutOfRange, "storybook has no paragraph " + std::to_string(index));
            }
            q.spec.stage = questions::QuestionStage::adaptation;
            q.spec.anchor = {questions::AnchorKind::paragraph, index, {}};
            break;
        }
        default: {
            if (state_.utterances.empty()) throw Error(ErrorCode::NoContributionYet, "no extension utterance yet");
            q.spec.stage = child_id == state_.roles->storyteller ? questions::QuestionStage::extension_teller
                                                                  : questions::QuestionStage::extension_listener;
            q.spec.anchor = {questions::AnchorKind::utterance, 0,
                             optional_field<std::string>(args, "utterance_id", state_.utterances.back().utterance_id)};
            break;
        }
    }
    return store_questions(actor, {q}, Json{{"stage", questions::to_string(q.spec.stage)}, {"coordinator_authored", true}});
}

CommandResult Engine::cmd_select_question(const Actor& actor, const Json& args) {
    const auto id = required_field<std::string>(args, "question_id");
    const bool override_flag = optional_field<bool>(args, "override", false);
    const auto& q = state_.question(id);
    if (stage_phase(q.spec.stage) != state_.phase) {
        throw Error(ErrorCode::WrongPhase, "question " + id + " belongs to the " +
                                               std::string(to_string(stage_phase(q.spec.stage))) + " phase");
    }
    if (q.status != questions::QuestionStatus::proposed) {
        throw Error(ErrorCode::WrongStatus, "question " + id + " is " + std::string(questions::to_string(q.status)));
    }
    const std::string expected = next_respondent(state_);
    if (q.spec.target_child != expected && !override_flag) {
        throw Error(ErrorCode::FairnessViolation, "next respondent is " + expected,
                    Json{{"expected_child", expected}, {"target_child", q.spec.target_child}});
    }
    const bool overridden = q.spec.target_child != expected;
    Json payload{{"question_id", id},
                 {"text", q.text},
                 {"child_id", q.spec.target_child},
                 {"display_name", state_.config.child(q.spec.target_child).display_name},
                 {"anchor", q.spec.anchor},
                 {"language", q.language},
                 {"override", overridden},
                 {"expected_child", expected}};
    Json result = payload;
    return emit(actor, "question_selected", std::move(payload), Visibility::all, std::move(result));
}

CommandResult Engine::cmd_skip_question(const Actor& actor, const Json& args) {
    const auto id = required_field<std::string>(args, "question_id");
    const auto& q = state_.question(id);
    if (q.status == questions::QuestionStatus::answered || q.status == questions::QuestionStatus::skipped) {
        throw Error(ErrorCode::WrongStatus, "question " + id + " is " + std::string(questions::to_string(q.status)));
    }
    return emit(actor, "question_skipped", Json{{"question_id", id}}, Visibility::all);
}

// ---------------------------------------------------------------------------
// Responses

CommandResult Engine::cmd_submit_answer_transcript(const Actor& actor, const Json& args) {
    const auto id = required_field<std::string>(args, "question_id");
    const auto& q = state_.question(id);
    std::string child_id = actor.participant_id;
    if (actor.role == ParticipantRole::coordinator) {
        child_id = optional_field<std::string>(args, "child_id", q.spec.target_child);
    } else if (args.contains("codes")) {
        throw Error(ErrorCode::Unauthorized, "children may not code responses");
    }
    if (q.status != questions::QuestionStatus::selected) {
        throw Error(ErrorCode::QuestionNotSelected, "question " + id + " is " + std::string(questions::to_string(q.status)));
    }
    if (child_id != q.spec.target_child) {
        throw Error(ErrorCode::WrongChild, "question " + id + " is for " + q.spec.target_child);
    }
    const auto codes = optional_field<analytics::Codes>(args, "codes", {});
    auto record = analytics::make_record("r" + std::to_string(state_.records.size() + 1), q,
                                         optional_field<std::string>(args, "transcript", ""), codes);
    const auto visibility = codes.any() ? Visibility::coordinator_only : Visibility::all;
    Json result{{"record_id", record.record_id}, {"tokens", record.tokens}};
    return emit(actor, "response_recorded", Json{{"record", std::move(record)}}, visibility, std::move(result));
}

CommandResult Engine::cmd_code_response(const Actor& actor, const Json& args) {
    const auto id = required_field<std::string>(args, "record_id");
    const auto dimension = analytics::code_dimension_from_string(required_field<std::string>(args, "dimension"));
    const int value = required_field<int>(args, "value");
    analytics::code_response(state_.record(id), dimension, value, analytics::CodeSource::coordinator);
    return emit(actor, "response_coded",
                Json{{"record_id", id},
                     {"dimension", analytics::to_string(dimension)},
                     {"value", value},
                     {"source", "coordinator"}},
                Visibility::coordinator_only);
}

CommandResult Engine::cmd_suggest_codes(const Actor& actor, const Json& args) {
    const auto id = required_field<std::string>(args, "record_id");
    const auto& record = state_.record(id);
    const auto& q = state_.question(record.question_id);
    std::string expected;
    if (q.spec.stage == questions::QuestionStage::cloze) expected = state_.cloze->blank(q.spec.anchor.index).target_word;
    const auto codes = analytics::suggest_codes(record, expected, gw(), templates());
    return emit(actor, "codes_suggested", Json{{"record_id", id}, {"codes", codes}, {"suggested", true}},
                Visibility::coordinator_only, Json{{"codes", codes}});
}

// ---------------------------------------------------------------------------
// Story edits

CommandResult Engine::cmd_fill_blank(const Actor& actor, const Json& args) {
    const int index = required_field<int>(args, "blank_index");
    const auto& blank = state_.cloze->blank(index);
    const std::string filled_by = optional_field<std::string>(args, "filled_by", blank.assigned_child);
    if (!state_.config.has_child(filled_by)) throw Error(ErrorCode::UnknownParticipant, "'" + filled_by + "' is not a child here");
    const bool approved = optional_field<bool>(args, "approved", true);
    const auto answer = required_field<std::string>(args, "answer_text");
    const auto updated = story::fill_blank(*state_.cloze, index, answer, filled_by, approved);
    const auto& stored = updated.blank(index);
    Json payload{{"blank_index", index},
                 {"answer_text", stored.fill->answer_text},
                 {"filled_by", filled_by},
                 {"approved", approved},
                 {"paragraph_index", stored.paragraph_index},
                 {"paragraph_text", story::render_cloze_paragraph(updated, stored.paragraph_index)}};
    Json result{{"cloze_completed", updated.status == story::ClozeStatus::completed}};
    return emit(actor, "blank_filled", std::move(payload), Visibility::all, std::move(result));
}

CommandResult Engine::cmd_adapt_paragraph(const Actor& actor, const Json& args) {
    const int index = required_field<int>(args, "paragraph_index");
    const auto text_value = required_field<std::string>(args, "new_text");
    const auto rationale = optional_field<std::string>(args, "rationale", "");
    const auto updated = story::apply_adaptation_edit(*state_.storybook, index, text_value, rationale);
    return emit(actor, "paragraph_adapted",
                Json{{"paragraph_index", index},
                     {"new_text", updated.paragraphs.at(index).text},
                     {"rationale", rationale},
                     {"language", updated.paragraphs.at(index).language}},
                Visibility::all);
}

CommandResult Engine::cmd_append_extension(const Actor& actor, const Json& args) {
    const auto child_id = optional_field<std::string>(args, "child_id", state_.roles->storyteller);
    if (!state_.config.has_child(child_id)) throw Error(ErrorCode::UnknownParticipant, "'" + child_id + "' is not a child here");
    if (child_id != state_.roles->storyteller) {
        throw Error(ErrorCode::NotStoryteller, "current storyteller is " + state_.roles->storyteller);
    }
    const auto lang = state_.config.child(child_id).learning_language;
    const std::string utterance_id = "u" + std::to_string(state_.utterances.size() + 1);
    const auto updated = story::append_extension(*state_.storybook, child_id, lang,
                                                 required_field<std::string>(args, "text"), utterance_id);
    return emit(actor, "extension_appended",
                Json{{"utterance_id", utterance_id},
                     {"child_id", child_id},
                     {"language", lang},
                     {"text", updated.paragraphs.back().text},
                     {"paragraph_index", updated.paragraphs.back().index}},
                Visibility::all, Json{{"utterance_id", utterance_id}});
}

CommandResult Engine::cmd_rotate_roles(const Actor& actor, const Json&) {
    if (!state_.contributed_this_round) {
        throw Error(ErrorCode::NoContributionYet, state_.roles->storyteller + " has not extended the story this round");
    }
    const std::string next_teller = state_.roles->storylistener;
    const auto turns = state_.teller_turns.count(next_teller) ? state_.teller_turns.at(next_teller) : 0;
    if (turns >= state_.config.extension_rounds_per_child) {
        throw Error(ErrorCode::ExtensionRoundsExhausted,
                    next_teller + " has already told " + std::to_string(turns) + " rounds");
    }
    RoleAssignment roles{next_teller, state_.roles->storyteller, state_.roles->round + 1};
    Json result = roles;
    return emit(actor, "roles_rotated", Json{{"roles", roles}}, Visibility::all, std::move(result));
}

// ---------------------------------------------------------------------------
// Materials

CommandResult Engine::cmd_generate_material(const Actor& actor, const Json& args) {
    const auto child_id = required_field<std::string>(args, "child_id");
    if (!state_.config.has_child(child_id)) throw Error(ErrorCode::UnknownParticipant, "'" + child_id + "' is not a child here");
    static const characteristics::GuidelineSet no_guidelines;
    auto m = materials::generate_material(required_field<std::string>(args, "keyword"), state_.config.child(child_id),
                                          describe(child_id), context_.guidelines ? *context_.guidelines : no_guidelines,
                                          gw(), templates(), "m" + std::to_string(state_.materials.size() + 1));
    Json result{{"material_id", m.material_id}, {"degraded", m.degraded}, {"flags", m.flags}};
    return emit(actor, "material_generated", Json{{"material", std::move(m)}}, Visibility::coordinator_only,
                std::move(result));
}

CommandResult Engine::cmd_present_material(const Actor& actor, const Json& args) {
    const auto id = required_field<std::string>(args, "material_id");
    const auto& m = state_.material(id);
    if (m.status == materials::MaterialStatus::presented) {
        CommandResult r;
        r.version = state_.version;
        r.warning = "material " + id + " was already presented";
        r.result = Json{{"material_id", id}, {"no_op", true}};
        return r;
    }
    Json payload{{"material_id", id},
                 {"keyword", m.keyword},
                 {"target_child", m.target_child},
                 {"explanation_text", m.explanation_text},
                 {"cultural_analogy", m.cultural_analogy},
                 {"image", m.image}};
    return emit(actor, "material_presented", std::move(payload), Visibility::all);
}

// ---------------------------------------------------------------------------
// Review

CommandResult Engine::cmd_build_report(const Actor& actor, const Json&) {
    auto report = analytics::build_report(state_.records, state_.config);
    Json result{{"feedback", report.feedback.size()}};
    return emit(actor, "report_built", Json{{"report", std::move(report)}}, Visibility::coordinator_only,
                std::move(result));
}

CommandResult Engine::cmd_approve_feedback(const Actor& actor, const Json& args) {
    if (!state_.report) throw Error(ErrorCode::GuardFailed, "report not built");
    const auto child_id = required_field<std::string>(args, "child_id");
    const auto entity = required_field<std::string>(args, "entity");
    const auto it = std::find_if(state_.report->feedback.begin(), state_.report->feedback.end(),
                                 [&](const analytics::FeatureFeedback& f) {
                                     return f.child_id == child_id && text::iequals(f.entity, entity);
                                 });
    if (it == state_.report->feedback.end()) {
        throw Error(ErrorCode::BadArguments, "no feedback proposal '" + entity + "' for " + child_id);
    }
    auto p = state_.config.child(child_id);
    const bool known = std::any_of(p.tags.begin(), p.tags.end(),
                                   [&](const profile::Tag& t) { return profile::same_tag(t, it->proposal); });
    if (!known) p.tags.push_back(it->proposal);
    profile::validate_profile(p);
    return emit(actor, "profile_upserted", Json{{"profile", p}}, Visibility::coordinator_only);
}

}  // namespace duet::session
