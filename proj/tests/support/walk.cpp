#include "walk.hpp"

#include "world.hpp"

namespace duet::testing {

namespace {

using questions::QuestionStatus;
using session::Phase;

template <typename T>
const T& pick(std::mt19937& rng, const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

int roll(std::mt19937& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool in_phase(const questions::GeneratedQuestion& q, Phase phase) {
    switch (q.spec.stage) {
        case questions::QuestionStage::cloze: return phase == Phase::Cloze;
        case questions::QuestionStage::adaptation: return phase == Phase::Adaptation;
        default: return phase == Phase::Extension;
    }
}

const std::vector<std::string> kEnAnswers = {"The lion runs.", "Um, a big zoo!", "The dog is happy", "uh I don't know",
                                             "Ultraman helps the tiger."};
const std::vector<std::string> kZhAnswers = {"老虎在跑。", "嗯，动物园！", "小狗很开心", "呃……我不知道", "熊猫在睡觉。"};

std::string answer_in(std::mt19937& rng, Language lang) { return pick(rng, lang == Language::en ? kEnAnswers : kZhAnswers); }

std::string more_text(std::mt19937& rng, Language lang) {
    static const std::vector<std::string> en = {" Then they laugh.", " The sun goes down.", " Everyone waves."};
    static const std::vector<std::string> zh = {"大家都笑了。", "太阳下山了。", "他们挥挥手。"};
    return pick(rng, lang == Language::en ? en : zh);
}

}  // namespace

session::EngineContext offline_context() {
    session::EngineContext c;
    c.clock = session::logical_clock();
    return c;
}

std::vector<Move> legal_moves(const session::SessionState& s, std::mt19937& rng) {
    std::vector<Move> out;
    const auto coordinator = session::Actor::coordinator(s.config.coordinator_id);
    if (s.report) return out;
    if (s.phase == Phase::Review) {
        out.push_back({coordinator, "build_report"});
        return out;
    }
    const bool live = s.phase == Phase::Cloze || s.phase == Phase::Adaptation || s.phase == Phase::Extension;
    if (!live) return out;

    // Questions
    const auto& child = pick(rng, s.config.children);
    Json ask{{"child_id", child.child_id},
             {"text", child.learning_language == Language::en ? "What do you see?" : "你看到了什么？"},
             {"attribute", questions::to_string(pick(rng, std::vector(questions::all_attributes().begin(),
                                                                      questions::all_attributes().end())))},
             {"explicitness", roll(rng, 0, 1) ? "explicit" : "implicit"}};
    bool can_ask = true;
    if (s.phase == Phase::Cloze) {
        ask["blank_index"] = pick(rng, s.cloze->blanks).blank_index;
    } else if (s.phase == Phase::Adaptation) {
        ask["paragraph_index"] = roll(rng, 0, static_cast<int>(s.storybook->paragraphs.size()) - 1);
    } else {
        can_ask = !s.utterances.empty();
    }
    if (can_ask) out.push_back({coordinator, "ask_question", ask});

    const std::string next = session::next_respondent(s);
    for (const auto& q : s.questions) {
        if (!in_phase(q, s.phase)) continue;
        if (q.status == QuestionStatus::proposed && q.spec.target_child == next) {
            out.push_back({coordinator, "select_question", {{"question_id", q.question_id}}});
        }
        if (q.status == QuestionStatus::proposed && roll(rng, 0, 3) == 0) {
            out.push_back({coordinator, "skip_question", {{"question_id", q.question_id}}});
        }
        if (q.status == QuestionStatus::selected) {
            Json args{{"question_id", q.question_id}, {"transcript", answer_in(rng, q.language)}};
            if (roll(rng, 0, 1)) {
                out.push_back({session::Actor::child(q.spec.target_child), "submit_answer_transcript", args});
            } else {
                args["codes"] = {{"topical_relevance", roll(rng, 0, 2)}};
                out.push_back({coordinator, "submit_answer_transcript", args});
            }
        }
    }
    if (!s.records.empty()) {
        static const std::vector<std::pair<std::string, int>> dims = {
            {"topical_relevance", 2}, {"intelligibility", 2}, {"accuracy", 1}};
        const auto& [dim, top] = pick(rng, dims);
        out.push_back({coordinator, "code_response",
                       {{"record_id", pick(rng, s.records).record_id}, {"dimension", dim}, {"value", roll(rng, 0, top)}}});
    }

    switch (s.phase) {
        case Phase::Cloze: {
            for (const auto& b : s.cloze->blanks) {
                if (b.fill && b.fill->approved) continue;
                const bool approve = roll(rng, 0, 4) != 0;
                out.push_back({coordinator, "fill_blank",
                               {{"blank_index", b.blank_index},
                                {"answer_text", approve ? b.target_word : std::string("something")},
                                {"approved", approve}}});
                break;
            }
            if (s.cloze->status == story::ClozeStatus::completed) {
                out.push_back({coordinator, "advance_phase", {{"to", "Adaptation"}}});
            }
            break;
        }
        case Phase::Adaptation: {
            const auto& p = pick(rng, s.storybook->paragraphs);
            out.push_back({coordinator, "adapt_paragraph",
                           {{"paragraph_index", p.index},
                            {"new_text", p.text + more_text(rng, p.language)},
                            {"rationale", "random walk"}}});
            out.push_back({coordinator, "advance_phase", {{"to", "Extension"}}});
            break;
        }
        case Phase::Extension: {
            const auto& teller = s.config.child(s.roles->storyteller);
            if (!s.contributed_this_round && s.storybook->paragraphs.back().language != teller.learning_language) {
                out.push_back({coordinator, "append_extension", {{"text", answer_in(rng, teller.learning_language)}}});
            }
            const auto& listener = s.roles->storylistener;
            const int turns = s.teller_turns.count(listener) ? s.teller_turns.at(listener) : 0;
            if (s.contributed_this_round && turns < s.config.extension_rounds_per_child) {
                out.push_back({coordinator, "rotate_roles"});
            }
            out.push_back({coordinator, "advance_phase", {{"to", "Review"}}});
            break;
        }
        default:
            break;
    }
    return out;
}

std::vector<Move> random_walk(session::Engine& engine, std::mt19937& rng, int max_steps) {
    std::vector<Move> applied;
    for (int i = 0; i < max_steps; ++i) {
        const auto moves = legal_moves(*engine.snapshot(), rng);
        if (moves.empty()) break;
        auto move = pick(rng, moves);
        // Phase advances end a phase for good; make them rarer than the rest.
        if (move.command == "advance_phase" && moves.size() > 1 && roll(rng, 0, 5) != 0) {
            move = pick(rng, moves);
            if (move.command == "advance_phase") continue;
        }
        engine.execute(move.actor, move.command, move.args);
        applied.push_back(std::move(move));
    }
    return applied;
}

}  // namespace duet::testing
