#include "duet/characteristics.hpp"

#include "world.hpp"

#include <gtest/gtest.h>

using namespace duet;
using namespace duet::characteristics;
using duet::testing::canned_gateway;

namespace {

struct Kids {
    profile::ChildProfile lisa;
    profile::ChildProfile lele;
};

Kids kids() {
    const auto config = duet::testing::zoo_config();
    return {config.child("lisa"), config.child("lele")};
}

const gateway::TemplateLibrary& templates() {
    static const auto lib = gateway::TemplateLibrary::builtin();
    return lib;
}

Json text_reply(const std::string& template_id, const Json& reply) {
    return Json{{"text", {{template_id, Json::array({reply.dump()})}}}};
}

}  // namespace

TEST(Guidelines, ApplicabilityUsesMetadataOnly) {
    const auto set = GuidelineSet::load_dir(duet::testing::guidelines_dir());
    const auto k = kids();
    std::set<std::string> both;
    for (const auto& g : set.applicable_to_both(k.lisa, k.lele)) both.insert(g.guideline_id);
    // The adventure rule covers boys aged four to six; Lele is eight.
    EXPECT_FALSE(both.count("boys-4-6-adventure"));
    EXPECT_TRUE(both.count("age-7-8-exploration"));
    EXPECT_TRUE(both.count("yct-level-1"));
    auto younger = k.lele;
    for (auto& t : younger.tags) {
        if (t.category == profile::TagCategory::Age) t.value = "5";
    }
    const auto* adventure = set.find("boys-4-6-adventure");
    ASSERT_NE(adventure, nullptr);
    EXPECT_TRUE(adventure->applies_to(younger));
    EXPECT_FALSE(adventure->applies_to(k.lisa));
}

TEST(Summary, DropsUntracedSentencesAndAddsMissingFacets) {
    const auto k = kids();
    auto gw = canned_gateway(text_reply(
        "individual_summary",
        Json{{"sentences", Json::array({{{"text", "Lisa is **curious** and loves animals."}, {"source_tags", {"curious"}}},
                                        {{"text", "She dreams of flying."}, {"source_tags", Json::array()}}})}}));
    const auto s = summarize_individual(k.lisa, *gw, templates());
    ASSERT_GE(s.sentences.size(), 2u);
    EXPECT_EQ(s.sentences[0].text, "Lisa is curious and loves animals.");
    for (const auto& sentence : s.sentences) {
        EXPECT_FALSE(sentence.source_tags.empty());
        EXPECT_EQ(sentence.text.find("flying"), std::string::npos);
    }
    const auto all = s.text();
    for (const auto& t : k.lisa.preferences()) EXPECT_NE(all.find(t.value), std::string::npos) << t.value;
    EXPECT_NE(all.find("A1"), std::string::npos);
}

TEST(Summary, GatewayFailureIsGenerationUnavailable) {
    auto gw = canned_gateway(Json::object());
    try {
        summarize_individual(kids().lisa, *gw, templates());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GenerationUnavailable);
    }
}

TEST(Summary, EditBumpsVersion) {
    IndividualSummary s{"lisa", {{"one", {"animals"}}}, 1};
    const auto edited = edit_summary(s, 0, "  Lisa   loves animals. ");
    EXPECT_EQ(edited.sentences[0].text, "Lisa loves animals.");
    EXPECT_EQ(edited.version, 2);
    EXPECT_THROW(edit_summary(s, 3, "x"), Error);
    EXPECT_THROW(edit_summary(s, 0, " "), Error);
}

TEST(Matching, ExactIsSymmetricAndIgnoresDislikes) {
    const auto k = kids();
    const auto ab = exact_matches(k.lisa, k.lele);
    const auto ba = exact_matches(k.lele, k.lisa);
    EXPECT_EQ(ab, ba);
    std::set<std::string> values;
    for (const auto& m : ab) values.insert(m.value);
    EXPECT_TRUE(values.count("animals"));
    EXPECT_TRUE(values.count("curious"));
    EXPECT_FALSE(values.count("scary monsters"));
}

TEST(Matching, ApproximateLabelsMapBackToPairs) {
    const auto k = kids();
    const Json reply{{"labels", Json::array({{{"pair", 1}, {"label", "making things"}},
                                             {{"pair", 2}, {"label", "no-match"}},
                                             {{"pair", 99}, {"label", "bogus"}}})}};
    auto gw1 = canned_gateway(text_reply("tag_matching", reply));
    auto gw2 = canned_gateway(text_reply("tag_matching", reply));
    const auto ab = match_tags(k.lisa, k.lele, *gw1, templates());
    const auto ba = match_tags(k.lele, k.lisa, *gw2, templates());
    ASSERT_EQ(ab.approximate.size(), 1u);
    EXPECT_EQ(ab.approximate[0].unified_category_label, "making things");
    // Same labelling regardless of argument order; tags follow the arguments.
    ASSERT_EQ(ba.approximate.size(), 1u);
    EXPECT_EQ(ab.approximate[0].tags[0], ba.approximate[0].tags[1]);
    EXPECT_FALSE(ab.degraded);
}

TEST(Matching, GatewayFailureDegradesToExactOnly) {
    const auto k = kids();
    auto gw = canned_gateway(Json::object());
    const auto m = match_tags(k.lisa, k.lele, *gw, templates());
    EXPECT_TRUE(m.degraded);
    EXPECT_TRUE(m.approximate.empty());
    EXPECT_EQ(m.exact, exact_matches(k.lisa, k.lele));
}

TEST(Reasoning, OnlyApplicableGuidelinesSurvive) {
    const auto k = kids();
    const auto set = GuidelineSet::load_dir(duet::testing::guidelines_dir());
    const Json reply{
        {"commonalities",
         Json::array({{{"statement", "Both like exploring."}, {"guideline_id", "age-7-8-exploration"}, {"inferred", true}},
                      {{"statement", "Both like adventure."}, {"guideline_id", "boys-4-6-adventure"}},
                      {{"statement", "Both read simple words."}, {"guideline_id", "yct-level-1"}, {"inferred", true}}})},
        {"differences", {"Lisa draws; Lele builds."}}};
    auto gw = canned_gateway(text_reply("common_reasoning", reply));
    const auto r = reason_commonalities(k.lisa, k.lele, set, *gw, templates());
    ASSERT_EQ(r.commonalities.size(), 2u);
    EXPECT_EQ(r.commonalities[0].guideline_id, "age-7-8-exploration");
    EXPECT_TRUE(r.commonalities[0].inferred);
    // Exam-level rules are never marked as inferred expansions.
    EXPECT_FALSE(r.commonalities[1].inferred);
    EXPECT_EQ(r.differences.size(), 1u);
}

TEST(Reasoning, NoApplicableGuidelineSkipsTheGateway) {
    const auto k = kids();
    auto gw = canned_gateway(Json::object());
    const auto r = reason_commonalities(k.lisa, k.lele, GuidelineSet{}, *gw, templates());
    EXPECT_TRUE(r.no_applicable_guideline);
    EXPECT_EQ(gw->provider_calls(), 0u);
}

TEST(CommonSummary, OrderedAndTraceTotal) {
    MatchSet ms;
    ms.exact = {{profile::TagCategory::PreferredTopic, "animals"}};
    ms.approximate = {{"making things", {profile::make_tag(profile::TagCategory::PreferredContent, "drawing"),
                                         profile::make_tag(profile::TagCategory::PreferredContent, "building blocks")}}};
    ReasoningResult rr;
    rr.commonalities = {{"Both like exploring.", "age-7-8-exploration", {}, true}};
    const auto s = compose_common_summary(ms, rr);
    ASSERT_EQ(s.sentences.size(), 3u);
    EXPECT_EQ(s.sentences[0], "Both children enjoy animals stories.");
    EXPECT_EQ(s.sentences[2], "Both like exploring.");
    EXPECT_TRUE(trace_is_total(s));
    auto broken = s;
    broken.trace.pop_back();
    EXPECT_FALSE(trace_is_total(broken));
    EXPECT_TRUE(compose_common_summary({}, {}).empty());
}
