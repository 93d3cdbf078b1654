#include "duet/session.hpp"

#include <algorithm>

namespace duet::session {

namespace {

constexpr std::array<std::string_view, 6> kPhaseNames = {"Preparation", "Framework", "Cloze",
                                                         "Adaptation",  "Extension", "Review"};

template <typename T>
T& find_by_id(std::vector<T>& items, const std::string& id, std::string T::*field, ErrorCode code, const char* what) {
    for (auto& item : items) {
        if (item.*field == id) return item;
    }
    throw Error(code, std::string("no ") + what + " '" + id + "'");
}

template <typename T>
const T& find_by_id(const std::vector<T>& items, std::string_view id, std::string T::*field, ErrorCode code,
                    const char* what) {
    for (const auto& item : items) {
        if (item.*field == id) return item;
    }
    throw Error(code, std::string("no ") + what + " '" + std::string(id) + "'");
}

}  // namespace

const std::vector<Phase>& all_phases() {
    static const std::vector<Phase> phases = {Phase::Preparation, Phase::Framework, Phase::Cloze,
                                              Phase::Adaptation,  Phase::Extension, Phase::Review};
    return phases;
}

std::string_view to_string(Phase p) {
    return kPhaseNames[static_cast<std::size_t>(p)];
}

Phase phase_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kPhaseNames.size(); ++i) {
        if (text::iequals(kPhaseNames[i], name)) return static_cast<Phase>(i);
    }
    throw Error(ErrorCode::BadArguments, "unknown phase '" + std::string(name) + "'");
}

std::optional<Phase> successor(Phase p) {
    if (p == Phase::Review) return std::nullopt;
    return static_cast<Phase>(static_cast<int>(p) + 1);
}

std::string_view to_string(Visibility v) {
    return v == Visibility::all ? "all" : "coordinator_only";
}

std::string_view to_string(ParticipantRole r) {
    return r == ParticipantRole::coordinator ? "coordinator" : "child";
}

ParticipantRole participant_role_from_string(std::string_view name) {
    if (name == "coordinator") return ParticipantRole::coordinator;
    if (name == "child") return ParticipantRole::child;
    throw Error(ErrorCode::BadArguments, "unknown participant role '" + std::string(name) + "'");
}

Json to_frame(const Event& e) {
    return Json{{"seq", e.seq}, {"kind", e.kind}, {"payload", e.payload}, {"visibility", e.visibility}};
}

// ---------------------------------------------------------------------------

const questions::GeneratedQuestion& SessionState::question(std::string_view id) const {
    return find_by_id(questions, id, &questions::GeneratedQuestion::question_id, ErrorCode::UnknownQuestion,
                      "question");
}

const analytics::ResponseRecord& SessionState::record(std::string_view id) const {
    return find_by_id(records, id, &analytics::ResponseRecord::record_id, ErrorCode::UnknownRecord, "record");
}

const materials::Material& SessionState::material(std::string_view id) const {
    return find_by_id(materials, id, &materials::Material::material_id, ErrorCode::UnknownMaterial, "material");
}

bool SessionState::is_participant(std::string_view id) const {
    return id == config.coordinator_id || config.has_child(id);
}

const characteristics::IndividualSummary* SessionState::summary_of(std::string_view child_id) const {
    auto it = summaries.find(std::string(child_id));
    return it == summaries.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------

std::string AbsoluteFairness::next(const TurnLedger& ledger, const std::vector<std::string>& children,
                                   const std::string& fresh_default) const {
    auto count = [&](const std::string& id) {
        auto it = ledger.questions_selected.find(id);
        return it == ledger.questions_selected.end() ? 0 : it->second;
    };
    std::vector<std::string> lowest;
    int best = 0;
    for (const auto& c : children) {
        const int n = count(c);
        if (lowest.empty() || n < best) {
            lowest = {c};
            best = n;
        } else if (n == best) {
            lowest.push_back(c);
        }
    }
    if (lowest.size() == 1) return lowest.front();
    if (!ledger.last_selected.empty()) {
        for (const auto& c : lowest) {
            if (c != ledger.last_selected) return c;
        }
    }
    if (std::find(lowest.begin(), lowest.end(), fresh_default) != lowest.end()) return fresh_default;
    return lowest.front();
}

std::string fresh_respondent(const SessionState& state) {
    if (state.cloze && !state.cloze->blanks.empty()) return state.cloze->blanks.front().assigned_child;
    return state.config.learner_of(state.config.first_paragraph_language).child_id;
}

std::string next_respondent(const SessionState& state) {
    std::vector<std::string> children;
    for (const auto& c : state.config.children) children.push_back(c.child_id);
    return AbsoluteFairness{}.next(state.ledger, children, fresh_respondent(state));
}

// ---------------------------------------------------------------------------

namespace {

questions::GeneratedQuestion& mutable_question(SessionState& s, const std::string& id) {
    return find_by_id(s.questions, id, &questions::GeneratedQuestion::question_id, ErrorCode::UnknownQuestion,
                      "question");
}

analytics::ResponseRecord& mutable_record(SessionState& s, const std::string& id) {
    return find_by_id(s.records, id, &analytics::ResponseRecord::record_id, ErrorCode::UnknownRecord, "record");
}

void enter_phase(SessionState& s, Phase to, const Json& payload) {
    s.phase = to;
    if (to == Phase::Adaptation && s.cloze) {
        s.storybook = story::storybook_from_cloze(*s.cloze);
    }
    if (to == Phase::Extension) {
        s.roles = payload.at("roles").get<RoleAssignment>();
        s.contributed_this_round = false;
        s.teller_turns[s.roles->storyteller] += 1;
    }
    s.shared_question.reset();
}

}  // namespace

void apply(SessionState& s, const Event& e) {
    const Json& p = e.payload;
    const std::string& k = e.kind;

    if (k == "session_opened") {
        s = SessionState{};
        s.session_id = p.at("session_id").get<std::string>();
        s.config = p.at("config").get<SessionConfig>();
        for (const auto& c : s.config.children) s.ledger.questions_selected[c.child_id] = 0;
    } else if (k == "participant_joined") {
        s.joined[p.at("participant_id").get<std::string>()] = p.at("role").get<ParticipantRole>();
    } else if (k == "profile_upserted") {
        auto profile = p.at("profile").get<profile::ChildProfile>();
        if (s.phase == Phase::Preparation) {
            s.summaries.erase(profile.child_id);
            s.common.reset();
        }
        s.config.child(profile.child_id) = std::move(profile);
    } else if (k == "target_words_set") {
        s.config.target_words = p.at("target_words").get<profile::TargetWordSet>();
    } else if (k == "individual_summarized" || k == "summary_edited") {
        auto summary = p.at("summary").get<characteristics::IndividualSummary>();
        s.summaries[summary.child_id] = std::move(summary);
    } else if (k == "common_summarized") {
        s.common = p.at("common").get<characteristics::CommonSummary>();
    } else if (k == "phase_advanced") {
        enter_phase(s, p.at("to").get<Phase>(), p);
    } else if (k == "framework_generated") {
        s.framework = p.at("framework").get<story::StoryFramework>();
        s.framework_report = p.at("report").get<story::ValidationReport>();
        ++s.frameworks_generated;
    } else if (k == "framework_edited") {
        s.framework = p.at("framework").get<story::StoryFramework>();
        s.framework_report = p.at("report").get<story::ValidationReport>();
    } else if (k == "framework_confirmed") {
        s.framework = p.at("framework").get<story::StoryFramework>();
        s.framework_report = story::ValidationReport{};
        s.cloze = p.at("cloze").get<story::ClozeStory>();
        s.ledger.blanks_assigned.clear();
        for (const auto& c : s.config.children) s.ledger.blanks_assigned[c.child_id] = 0;
        for (const auto& b : s.cloze->blanks) ++s.ledger.blanks_assigned[b.assigned_child];
    } else if (k == "questions_generated") {
        for (const auto& q : p.at("questions")) s.questions.push_back(q.get<questions::GeneratedQuestion>());
    } else if (k == "question_selected") {
        auto& q = mutable_question(s, p.at("question_id").get<std::string>());
        q.status = questions::QuestionStatus::selected;
        const auto child = q.spec.target_child;
        ++s.ledger.questions_selected[child];
        s.ledger.last_selected = child;
        if (p.at("override").get<bool>()) {
            s.ledger.overrides.push_back({q.question_id, child, p.at("expected_child").get<std::string>()});
        }
        s.shared_question = q.question_id;
    } else if (k == "question_skipped") {
        auto& q = mutable_question(s, p.at("question_id").get<std::string>());
        q.status = questions::QuestionStatus::skipped;
        if (s.shared_question == q.question_id) s.shared_question.reset();
    } else if (k == "response_recorded") {
        auto record = p.at("record").get<analytics::ResponseRecord>();
        mutable_question(s, record.question_id).status = questions::QuestionStatus::answered;
        if (s.shared_question == record.question_id) s.shared_question.reset();
        s.records.push_back(std::move(record));
    } else if (k == "response_coded") {
        auto& r = mutable_record(s, p.at("record_id").get<std::string>());
        const auto source = p.at("source").get<std::string>() == "coordinator"
                                ? analytics::CodeSource::coordinator
                                : analytics::CodeSource::gateway_suggestion;
        r = analytics::code_response(r, analytics::code_dimension_from_string(p.at("dimension").get<std::string>()),
                                     p.at("value").get<int>(), source);
    } else if (k == "codes_suggested") {
        auto& r = mutable_record(s, p.at("record_id").get<std::string>());
        const auto codes = p.at("codes").get<analytics::Codes>();
        for (auto d : {analytics::CodeDimension::topical_relevance, analytics::CodeDimension::accuracy}) {
            if (auto v = codes.get(d)) r = analytics::code_response(r, d, *v, analytics::CodeSource::gateway_suggestion);
        }
    } else if (k == "blank_filled") {
        s.cloze = story::fill_blank(*s.cloze, p.at("blank_index").get<int>(), p.at("answer_text").get<std::string>(),
                                    p.at("filled_by").get<std::string>(), p.at("approved").get<bool>());
    } else if (k == "paragraph_adapted") {
        s.storybook = story::apply_adaptation_edit(*s.storybook, p.at("paragraph_index").get<int>(),
                                                   p.at("new_text").get<std::string>(),
                                                   p.at("rationale").get<std::string>());
    } else if (k == "extension_appended") {
        const auto child = p.at("child_id").get<std::string>();
        const auto text_value = p.at("text").get<std::string>();
        const auto utterance_id = p.at("utterance_id").get<std::string>();
        s.storybook = story::append_extension(*s.storybook, child, p.at("language").get<Language>(), text_value,
                                              utterance_id);
        s.utterances.push_back({utterance_id, child, s.storybook->paragraphs.back().text, s.roles->round});
        s.contributed_this_round = true;
    } else if (k == "roles_rotated") {
        s.roles = p.at("roles").get<RoleAssignment>();
        s.contributed_this_round = false;
        s.teller_turns[s.roles->storyteller] += 1;
    } else if (k == "material_generated") {
        s.materials.push_back(p.at("material").get<materials::Material>());
    } else if (k == "material_presented") {
        find_by_id(s.materials, p.at("material_id").get<std::string>(), &materials::Material::material_id,
                   ErrorCode::UnknownMaterial, "material")
            .status = materials::MaterialStatus::presented;
    } else if (k == "report_built") {
        s.report = p.at("report").get<analytics::EngagementReport>();
    } else {
        throw Error(ErrorCode::SchemaMismatch, "unknown event kind '" + k + "'");
    }

    s.event_log.push_back(e);
    s.version = e.seq;
}

SessionState replay(const std::vector<Event>& events) {
    SessionState s;
    for (const auto& e : events) apply(s, e);
    return s;
}

// ---------------------------------------------------------------------------

void to_json(Json& j, Phase p) {
    j = std::string(to_string(p));
}
void from_json(const Json& j, Phase& p) {
    p = phase_from_string(j.get<std::string>());
}
void to_json(Json& j, Visibility v) {
    j = std::string(to_string(v));
}
void from_json(const Json& j, Visibility& v) {
    const auto s = j.get<std::string>();
    if (s == "all") {
        v = Visibility::all;
    } else if (s == "coordinator_only") {
        v = Visibility::coordinator_only;
    } else {
        throw Error(ErrorCode::BadArguments, "unknown visibility '" + s + "'");
    }
}
void to_json(Json& j, ParticipantRole r) {
    j = std::string(to_string(r));
}
void from_json(const Json& j, ParticipantRole& r) {
    r = participant_role_from_string(j.get<std::string>());
}

void to_json(Json& j, const RoleAssignment& r) {
    j = Json{{"storyteller", r.storyteller}, {"storylistener", r.storylistener}, {"round", r.round}};
}
void from_json(const Json& j, RoleAssignment& r) {
    r.storyteller = required_field<std::string>(j, "storyteller");
    r.storylistener = required_field<std::string>(j, "storylistener");
    r.round = required_field<int>(j, "round");
}

void to_json(Json& j, const OverrideRecord& o) {
    j = Json{{"question_id", o.question_id}, {"child_id", o.child_id}, {"expected_child", o.expected_child}};
}
void from_json(const Json& j, OverrideRecord& o) {
    o.question_id = required_field<std::string>(j, "question_id");
    o.child_id = required_field<std::string>(j, "child_id");
    o.expected_child = required_field<std::string>(j, "expected_child");
}

void to_json(Json& j, const TurnLedger& l) {
    j = Json{{"questions_selected", l.questions_selected},
             {"overrides", l.overrides},
             {"blanks_assigned", l.blanks_assigned},
             {"last_selected", l.last_selected}};
}
void from_json(const Json& j, TurnLedger& l) {
    l.questions_selected = required_field<std::map<std::string, int>>(j, "questions_selected");
    l.overrides = required_field<std::vector<OverrideRecord>>(j, "overrides");
    l.blanks_assigned = required_field<std::map<std::string, int>>(j, "blanks_assigned");
    l.last_selected = required_field<std::string>(j, "last_selected");
}

void to_json(Json& j, const Event& e) {
    j = Json{{"seq", e.seq},
             {"timestamp", e.timestamp},
             {"kind", e.kind},
             {"payload", e.payload},
             {"visibility", e.visibility},
             {"actor", e.actor}};
}
void from_json(const Json& j, Event& e) {
    e.seq = required_field<std::uint64_t>(j, "seq");
    e.timestamp = optional_field<std::string>(j, "timestamp", "");
    e.kind = required_field<std::string>(j, "kind");
    e.payload = j.contains("payload") ? j.at("payload") : Json::object();
    e.visibility = required_field<Visibility>(j, "visibility");
    e.actor = optional_field<std::string>(j, "actor", "");
}

void to_json(Json& j, const Utterance& u) {
    j = Json{{"utterance_id", u.utterance_id}, {"child_id", u.child_id}, {"text", u.text}, {"round", u.round}};
}
void from_json(const Json& j, Utterance& u) {
    u.utterance_id = required_field<std::string>(j, "utterance_id");
    u.child_id = required_field<std::string>(j, "child_id");
    u.text = required_field<std::string>(j, "text");
    u.round = required_field<int>(j, "round");
}

void to_json(Json& j, const SessionState& s) {
    j = Json{{"session_id", s.session_id},
             {"phase", s.phase},
             {"config", s.config},
             {"roles", s.roles},
             {"ledger", s.ledger},
             {"event_log", s.event_log},
             {"version", s.version},
             {"joined", s.joined},
             {"summaries", s.summaries},
             {"common", s.common},
             {"framework", s.framework},
             {"framework_report", s.framework_report},
             {"frameworks_generated", s.frameworks_generated},
             {"cloze", s.cloze},
             {"storybook", s.storybook},
             {"questions", s.questions},
             {"records", s.records},
             {"materials", s.materials},
             {"utterances", s.utterances},
             {"contributed_this_round", s.contributed_this_round},
             {"teller_turns", s.teller_turns},
             {"shared_question", s.shared_question},
             {"report", s.report}};
}

void from_json(const Json& j, SessionState& s) {
    using std::nullopt;
    s.session_id = required_field<std::string>(j, "session_id");
    s.phase = required_field<Phase>(j, "phase");
    s.config = required_field<SessionConfig>(j, "config");
    s.roles = optional_field<std::optional<RoleAssignment>>(j, "roles", nullopt);
    s.ledger = required_field<TurnLedger>(j, "ledger");
    s.event_log = required_field<std::vector<Event>>(j, "event_log");
    s.version = required_field<std::uint64_t>(j, "version");
    s.joined = required_field<std::map<std::string, ParticipantRole>>(j, "joined");
    s.summaries = required_field<std::map<std::string, characteristics::IndividualSummary>>(j, "summaries");
    s.common = optional_field<std::optional<characteristics::CommonSummary>>(j, "common", nullopt);
    s.framework = optional_field<std::optional<story::StoryFramework>>(j, "framework", nullopt);
    s.framework_report = optional_field<std::optional<story::ValidationReport>>(j, "framework_report", nullopt);
    s.frameworks_generated = required_field<int>(j, "frameworks_generated");
    s.cloze = optional_field<std::optional<story::ClozeStory>>(j, "cloze", nullopt);
    s.storybook = optional_field<std::optional<story::Storybook>>(j, "storybook", nullopt);
    s.questions = required_field<std::vector<questions::GeneratedQuestion>>(j, "questions");
    s.records = required_field<std::vector<analytics::ResponseRecord>>(j, "records");
    s.materials = required_field<std::vector<materials::Material>>(j, "materials");
    s.utterances = required_field<std::vector<Utterance>>(j, "utterances");
    s.contributed_this_round = required_field<bool>(j, "contributed_this_round");
    s.teller_turns = required_field<std::map<std::string, int>>(j, "teller_turns");
    s.shared_question = optional_field<std::optional<std::string>>(j, "shared_question", nullopt);
    s.report = optional_field<std::optional<analytics::EngagementReport>>(j, "report", nullopt);
}

}  // namespace duet::session
