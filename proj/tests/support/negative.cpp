#include "negative.hpp"

#include "walk.hpp"
#include "world.hpp"

#include <map>

namespace duet::testing {

namespace {

using session::Phase;

// Script positions (count of leading actions applied) for each phase of the
// zoo session, taken right after the advancing action.
const std::vector<std::pair<Phase, std::size_t>> kPhaseStarts = {
    {Phase::Preparation, 3}, {Phase::Framework, 12}, {Phase::Cloze, 20},
    {Phase::Adaptation, 90}, {Phase::Extension, 136}, {Phase::Review, 194},
};

}  // namespace

std::vector<NegativeCase> negative_cases() {
    std::vector<NegativeCase> out;
    const auto t = teacher();
    auto add = [&](std::string name, std::size_t prefix, session::Actor actor, std::string command, Json args,
                   ErrorCode code) {
        out.push_back({std::move(name), prefix, std::move(actor), std::move(command), std::move(args), code});
    };

    // Illegal transitions: every target except the immediate successor.
    for (const auto& [from, prefix] : kPhaseStarts) {
        const auto next = session::successor(from);
        for (auto to : session::all_phases()) {
            if (next && *next == to) continue;
            add("transition " + std::string(session::to_string(from)) + " -> " + std::string(session::to_string(to)),
                prefix, t, "advance_phase", {{"to", session::to_string(to)}}, ErrorCode::IllegalTransition);
        }
    }

    // Role violations: a child credential on every coordinator command, in
    // every phase, always rejected before any phase or handler check.
    for (const auto& name : session::Engine::command_names()) {
        if (session::Engine::child_may_issue(name)) continue;
        add("child issues " + name, 20, lisa(), name, Json::object(), ErrorCode::Unauthorized);
    }
    add("child credential for coordinator id", 3, session::Actor::child("teacher"), "join", {}, ErrorCode::Unauthorized);
    add("coordinator credential for child id", 3, session::Actor::coordinator("lisa"), "join", {},
        ErrorCode::Unauthorized);
    add("child joins as the other child", 3, lisa(), "join", {{"participant_id", "lele"}}, ErrorCode::Unauthorized);
    add("child submits codes", 25, lisa(), "submit_answer_transcript",
        {{"question_id", "q1"}, {"transcript", "老虎"}, {"codes", {{"accuracy", 1}}}}, ErrorCode::Unauthorized);
    add("stranger", 3, session::Actor::coordinator("ghost"), "join", {}, ErrorCode::UnknownParticipant);
    add("unknown command", 3, t, "fly_away", {}, ErrorCode::UnknownCommand);
    add("arguments not an object", 3, t, "join", Json::array({1}), ErrorCode::BadArguments);

    // Preparation guards.
    add("framework needs target words", 3, t, "advance_phase", {{"to", "Framework"}}, ErrorCode::GuardFailed);
    add("framework needs common summary", 7, t, "advance_phase", {{"to", "Framework"}}, ErrorCode::GuardFailed);
    add("edit summary before summarizing", 3, t, "edit_summary", {{"child_id", "lisa"}, {"index", 0}, {"text", "x"}},
        ErrorCode::GuardFailed);
    add("duplicate target word", 3, t, "set_target_words", {{"zh", {"老虎", "老虎"}}, {"en", {"zoo"}}},
        ErrorCode::DuplicateWord);
    add("fill blank while preparing", 3, t, "fill_blank", {{"blank_index", 1}, {"answer_text", "x"}},
        ErrorCode::WrongPhase);

    // Framework guards.
    add("cloze needs confirmed framework", 12, t, "advance_phase", {{"to", "Cloze"}}, ErrorCode::GuardFailed);
    add("confirm without draft", 12, t, "confirm_framework", {}, ErrorCode::WrongStatus);
    add("edit without draft", 12, t, "edit_paragraph", {{"index", 0}, {"text", "x"}}, ErrorCode::WrongStatus);
    add("regenerate without draft", 12, t, "regenerate_framework", {}, ErrorCode::WrongStatus);
    add("confirm invalid draft", 13, t, "confirm_framework", {}, ErrorCode::ValidationFailed);
    add("edit out of range", 13, t, "edit_paragraph", {{"index", 42}, {"text", "x"}}, ErrorCode::OutOfRange);
    add("confirm twice", 18, t, "confirm_framework", {}, ErrorCode::WrongStatus);
    add("edit after confirm", 18, t, "edit_paragraph", {{"index", 1}, {"text", "x"}}, ErrorCode::WrongStatus);
    add("regenerate after confirm", 18, t, "regenerate_framework", {}, ErrorCode::WrongStatus);

    // Cloze guards.
    add("adaptation needs completed cloze", 20, t, "advance_phase", {{"to", "Adaptation"}}, ErrorCode::GuardFailed);
    add("unknown blank", 20, t, "fill_blank", {{"blank_index", 99}, {"answer_text", "x"}}, ErrorCode::UnknownBlank);
    add("blank answer", 20, t, "fill_blank", {{"blank_index", 1}, {"answer_text", "  "}}, ErrorCode::EmptyInput);
    add("unknown material", 20, t, "present_material", {{"material_id", "m9"}}, ErrorCode::UnknownMaterial);
    add("unknown question", 20, t, "select_question", {{"question_id", "q99"}}, ErrorCode::UnknownQuestion);
    add("answer before selection", 24, lisa(), "submit_answer_transcript", {{"question_id", "q1"}, {"transcript", "x"}},
        ErrorCode::QuestionNotSelected);
    add("select twice", 25, t, "select_question", {{"question_id", "q1"}}, ErrorCode::WrongStatus);
    add("wrong child answers", 25, lele(), "submit_answer_transcript", {{"question_id", "q1"}, {"transcript", "x"}},
        ErrorCode::WrongChild);
    add("coordinator answers for the wrong child", 25, t, "submit_answer_transcript",
        {{"question_id", "q1"}, {"child_id", "lele"}, {"transcript", "x"}}, ErrorCode::WrongChild);
    add("code out of range", 30, t, "code_response", {{"record_id", "r1"}, {"dimension", "accuracy"}, {"value", 3}},
        ErrorCode::OutOfRange);
    add("code unknown record", 30, t, "code_response",
        {{"record_id", "r99"}, {"dimension", "accuracy"}, {"value", 1}}, ErrorCode::UnknownRecord);
    add("fill approved blank", 31, t, "fill_blank", {{"blank_index", 1}, {"answer_text", "老虎"}},
        ErrorCode::AlreadyFilled);
    add("questions for filled blank", 31, t, "generate_cloze_questions", {{"blank_index", 1}},
        ErrorCode::AlreadyFilled);
    add("unfair selection", 33, t, "select_question", {{"question_id", "q2"}}, ErrorCode::FairnessViolation);

    // Adaptation guards.
    add("adapt out of range", 90, t, "adapt_paragraph", {{"paragraph_index", 42}, {"new_text", "x"}},
        ErrorCode::OutOfRange);
    add("adapt to blank", 90, t, "adapt_paragraph", {{"paragraph_index", 0}, {"new_text", " "}}, ErrorCode::EmptyInput);
    add("ask about missing paragraph", 90, t, "ask_question",
        {{"child_id", "lisa"}, {"text", "?"}, {"attribute", "setting"}, {"paragraph_index", 42}}, ErrorCode::OutOfRange);
    add("select question from an earlier phase", 90, t, "select_question", {{"question_id", "q2"}},
        ErrorCode::WrongPhase);
    add("skip skipped question", 92, t, "skip_question", {{"question_id", "q29"}}, ErrorCode::WrongStatus);

    // Extension guards.
    add("listener extends", 136, t, "append_extension", {{"child_id", "lele"}, {"text", "x"}},
        ErrorCode::NotStoryteller);
    add("questions before any extension", 136, t, "generate_extension_questions", {}, ErrorCode::NoContributionYet);
    add("ask before any extension", 136, t, "ask_question",
        {{"child_id", "lisa"}, {"text", "?"}, {"attribute", "setting"}}, ErrorCode::NoContributionYet);
    add("rotate before extending", 136, t, "rotate_roles", {}, ErrorCode::NoContributionYet);
    add("teller extends twice", 139, t, "append_extension", {{"text", "老虎又唱歌。"}},
        ErrorCode::AlternationViolation);
    add("rotate twice", 151, t, "rotate_roles", {}, ErrorCode::NoContributionYet);
    add("rounds exhausted", 192, t, "rotate_roles", {}, ErrorCode::ExtensionRoundsExhausted);
    add("extension with unknown first teller", 135, t, "advance_phase", {{"to", "Extension"}, {"first_teller", "ghost"}},
        ErrorCode::UnknownParticipant);

    // Review guards.
    add("feedback before report", 194, t, "approve_feedback", {{"child_id", "lele"}, {"entity", "Ultraman"}},
        ErrorCode::GuardFailed);
    add("no such proposal", 195, t, "approve_feedback", {{"child_id", "lisa"}, {"entity", "Ultraman"}},
        ErrorCode::BadArguments);
    add("fill blank in review", 194, t, "fill_blank", {{"blank_index", 1}, {"answer_text", "x"}}, ErrorCode::WrongPhase);
    return out;
}

std::vector<NegativeOutcome> run_negative_cases(const std::vector<NegativeCase>& cases) {
    std::map<std::size_t, session::SessionState> states;
    for (const auto& c : cases) {
        if (states.count(c.prefix)) continue;
        ZooWorld world;
        states.emplace(c.prefix, *world.run_prefix(c.prefix)->snapshot());
    }
    std::vector<NegativeOutcome> out;
    for (const auto& c : cases) {
        const auto& before = states.at(c.prefix);
        auto engine = session::Engine::restore(before, offline_context());
        NegativeOutcome o;
        o.c = &c;
        o.got = error_of([&] { engine->execute(c.actor, c.command, c.args); });
        const auto after = engine->snapshot();
        o.untouched = after->version == before.version && after->event_log == before.event_log;
        out.push_back(o);
    }
    return out;
}

}  // namespace duet::testing
