#include "duet/engine.hpp"
#include "duet/invariants.hpp"

#include "negative.hpp"
#include "walk.hpp"
#include "world.hpp"

#include <gtest/gtest.h>

#include <thread>

using namespace duet;
using namespace duet::session;
using namespace duet::testing;

namespace {

SessionState with_ledger(std::map<std::string, int> selected, std::string last) {
    SessionState s;
    s.config = zoo_config();
    s.ledger.questions_selected = std::move(selected);
    s.ledger.last_selected = std::move(last);
    return s;
}

const SessionState& cloze_start() {
    static const SessionState s = *ZooWorld().run_until_phase(Phase::Cloze)->snapshot();
    return s;
}

}  // namespace

TEST(Phases, SuccessorChain) {
    EXPECT_EQ(successor(Phase::Preparation), Phase::Framework);
    EXPECT_EQ(successor(Phase::Extension), Phase::Review);
    EXPECT_FALSE(successor(Phase::Review));
    EXPECT_EQ(phase_from_string("Adaptation"), Phase::Adaptation);
}

TEST(Respondent, FewerSelectionsWins) {
    EXPECT_EQ(next_respondent(with_ledger({{"lisa", 3}, {"lele", 2}}, "lele")), "lele");
    EXPECT_EQ(next_respondent(with_ledger({{"lisa", 1}, {"lele", 4}}, "lisa")), "lisa");
}

TEST(Respondent, TieGoesToTheOtherChild) {
    EXPECT_EQ(next_respondent(with_ledger({{"lisa", 2}, {"lele", 2}}, "lisa")), "lele");
    EXPECT_EQ(next_respondent(with_ledger({{"lisa", 2}, {"lele", 2}}, "lele")), "lisa");
}

TEST(Respondent, FreshSessionStartsWithFirstParagraphLearner) {
    // The story opens in Chinese, which Lisa is learning.
    EXPECT_EQ(next_respondent(with_ledger({}, "")), "lisa");
    EXPECT_EQ(next_respondent(cloze_start()), cloze_start().cloze->blanks.front().assigned_child);
}

TEST(Engine, OpenEmitsCoordinatorOnlyEvent) {
    ZooWorld world;
    auto engine = Engine::open("s1", world.script.config, world.context());
    const auto s = engine->snapshot();
    EXPECT_EQ(s->version, 1u);
    ASSERT_EQ(s->event_log.size(), 1u);
    EXPECT_EQ(s->event_log[0].kind, "session_opened");
    EXPECT_EQ(s->event_log[0].visibility, Visibility::coordinator_only);
    EXPECT_EQ(s->phase, Phase::Preparation);

    auto bad = world.script.config;
    bad.children.pop_back();
    EXPECT_EQ(error_of([&] { Engine::open("s2", bad, world.context()); }), ErrorCode::InvalidConfig);
}

TEST(Engine, JoinsAreSequencedEvents) {
    ZooWorld world;
    const auto s = world.run_prefix(3)->snapshot();
    ASSERT_EQ(s->event_log.size(), 4u);
    for (std::size_t i = 1; i < 4; ++i) {
        EXPECT_EQ(s->event_log[i].seq, i + 1);
        EXPECT_EQ(s->event_log[i].kind, "participant_joined");
    }
    EXPECT_EQ(s->joined.size(), 3u);
    EXPECT_EQ(s->joined.at("lisa"), ParticipantRole::child);
}

TEST(Engine, ChildMayOnlyJoinAndAnswer) {
    std::set<std::string> allowed;
    for (const auto& c : Engine::command_names()) {
        if (Engine::child_may_issue(c)) allowed.insert(c);
    }
    EXPECT_EQ(allowed, (std::set<std::string>{"join", "submit_answer_transcript"}));
    EXPECT_TRUE(Engine::allowed_phases("nope").empty());
}

TEST(Engine, PresentingTwiceIsAWarningNotAnEvent) {
    ZooWorld world;
    auto engine = world.run_prefix(22);
    const auto before = engine->snapshot()->version;
    const auto r = engine->execute(teacher(), "present_material", {{"material_id", "m1"}});
    EXPECT_FALSE(r.event);
    EXPECT_FALSE(r.warning.empty());
    EXPECT_EQ(engine->snapshot()->version, before);
}

TEST(Engine, AskQuestionNeedsNoGateway) {
    auto engine = Engine::restore(cloze_start(), offline_context());
    const auto r = engine->execute(teacher(), "ask_question",
                                   {{"child_id", "lele"}, {"text", "Where  do they go?"}, {"attribute", "setting"},
                                    {"blank_index", 2}});
    const auto ids = r.result.at("question_ids");
    ASSERT_EQ(ids.size(), 1u);
    const auto& q = engine->snapshot()->question(ids[0].get<std::string>());
    EXPECT_EQ(q.text, "Where do they go?");
    EXPECT_TRUE(q.coordinator_authored);
    EXPECT_EQ(q.language, Language::en);
    EXPECT_EQ(error_of([&] { engine->execute(teacher(), "generate_cloze_questions", {{"blank_index", 2}}); }),
              ErrorCode::GenerationUnavailable);
}

TEST(Engine, OverrideIsRecorded) {
    auto engine = Engine::restore(cloze_start(), offline_context());
    const auto next = next_respondent(*engine->snapshot());
    const std::string other = next == "lisa" ? "lele" : "lisa";
    const auto r = engine->execute(teacher(), "ask_question",
                                   {{"child_id", other}, {"text", "?"}, {"attribute", "action"}, {"blank_index", 1}});
    const auto id = r.result.at("question_ids")[0].get<std::string>();
    const auto sel = engine->execute(teacher(), "select_question", {{"question_id", id}, {"override", true}});
    EXPECT_TRUE(sel.result.at("override").get<bool>());
    const auto s = engine->snapshot();
    ASSERT_EQ(s->ledger.overrides.size(), 1u);
    EXPECT_EQ(s->ledger.overrides[0].expected_child, next);
    EXPECT_EQ(s->ledger.questions_selected.at(other), 1);
}

TEST(Engine, NegativeSuite) {
    const auto cases = negative_cases();
    EXPECT_GT(cases.size(), 60u);
    for (const auto& o : run_negative_cases(cases)) {
        EXPECT_TRUE(o.ok()) << o.c->name << ": expected " << to_string(o.c->expected) << ", got "
                            << (o.got ? std::string(to_string(*o.got)) : std::string("success"))
                            << (o.untouched ? "" : " (state changed)");
    }
}

TEST(Engine, RandomLegalWalksReplayToEqualState) {
    std::mt19937 rng(11);
    for (int i = 0; i < 20; ++i) {
        auto engine = Engine::restore(cloze_start(), offline_context());
        const auto moves = random_walk(*engine, rng, 120);
        EXPECT_FALSE(moves.empty());
        const auto s = engine->snapshot();
        EXPECT_EQ(replay(s->event_log), *s);
        EXPECT_TRUE(invariants::check(*s).empty());
    }
}

TEST(Engine, ConcurrentCommandsGetSequentialVersions) {
    auto engine = Engine::restore(cloze_start(), offline_context());
    const auto start = engine->snapshot()->version;
    std::vector<std::thread> threads;
    std::vector<std::vector<std::uint64_t>> seen(4);
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 25; ++i) {
                const auto r = engine->execute(teacher(), "ask_question",
                                               {{"child_id", t % 2 ? "lisa" : "lele"},
                                                {"text", "Q" + std::to_string(t) + "-" + std::to_string(i)},
                                                {"attribute", "setting"},
                                                {"blank_index", 1}});
                seen[t].push_back(r.version);
                // Readers never block writers and always see a consistent log.
                const auto snap = engine->snapshot();
                EXPECT_EQ(snap->event_log.size(), snap->version);
            }
        });
    }
    for (auto& th : threads) th.join();
    std::vector<std::uint64_t> all;
    for (const auto& v : seen) all.insert(all.end(), v.begin(), v.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], start + i + 1);
    const auto s = engine->snapshot();
    EXPECT_EQ(s->questions.size(), cloze_start().questions.size() + 100);
    EXPECT_EQ(replay(s->event_log), *s);
}

TEST(Session, StateJsonRoundTrip) {
    ZooWorld world;
    const auto s = world.run_prefix(world.script.actions.size())->snapshot();
    EXPECT_EQ(s->phase, Phase::Review);
    const Json j = *s;
    EXPECT_EQ(j.get<SessionState>(), *s);
    EXPECT_EQ(replay(s->event_log), *s);
}

TEST(Session, FramesCarryVisibility) {
    Event e{7, "t", "question_selected", Json{{"question_id", "q1"}}, Visibility::all, "teacher"};
    const auto f = to_frame(e);
    EXPECT_EQ(f.at("seq"), 7);
    EXPECT_EQ(f.at("kind"), "question_selected");
    EXPECT_EQ(f.at("visibility"), "all");
    EXPECT_FALSE(f.contains("actor"));
}
