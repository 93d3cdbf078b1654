#include "duet/gateway.hpp"

#include "world.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <cstdlib>
#include <filesystem>
#include <thread>

using namespace duet;
using namespace duet::gateway;

namespace {

const Json kSchema = Json::parse(R"({"type": "object", "required": ["n"], "properties": {"n": {"type": "integer"}}})");

RenderedPrompt prompt(const std::string& text) {
    return render_template(PromptTemplate("probe", "say {{what}}"), {{"what", text}});
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("duet_gateway_" + name)).string();
}

}  // namespace

TEST(Templates, PlaceholdersDefineRequiredVariables) {
    PromptTemplate t("t", "Hi {{name}}, {{name}} likes {{topic}}.");
    EXPECT_EQ(t.required_variables(), (std::set<std::string>{"name", "topic"}));
    EXPECT_THROW(PromptTemplate("t", "{{a}}", {"a", "b"}), Error);
}

TEST(Templates, RenderNamesMissingAndUnknownVariables) {
    PromptTemplate t("t", "Hi {{name}}");
    EXPECT_EQ(render_template(t, {{"name", "Lele"}}).text, "Hi Lele");
    try {
        render_template(t, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnboundVariable);
        EXPECT_NE(std::string(e.what()).find("name"), std::string::npos);
    }
    try {
        render_template(t, {{"name", "Lele"}, {"extra", "x"}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownVariable);
    }
}

TEST(Templates, BuiltinLibraryCoversEveryGenerationCall) {
    const auto lib = TemplateLibrary::builtin();
    for (const char* id : {"individual_summary", "tag_matching", "common_reasoning", "story", "question_cloze",
                           "question_adaptation", "question_extension", "material", "code_suggestion"}) {
        EXPECT_TRUE(lib.contains(id)) << id;
    }
}

TEST(Templates, DirectoryTemplatesOverrideBuiltins) {
    const auto dir = temp_path("templates");
    std::filesystem::create_directories(dir);
    write_text_file_atomic(dir + "/material.txt", "explain {{keyword}}");
    auto lib = TemplateLibrary::builtin();
    lib.merge(TemplateLibrary::load_dir(dir));
    EXPECT_EQ(lib.get("material").body(), "explain {{keyword}}");
    std::filesystem::remove_all(dir);
}

TEST(Schema, SubsetValidation) {
    EXPECT_FALSE(schema_violation(kSchema, Json{{"n", 3}}));
    EXPECT_TRUE(schema_violation(kSchema, Json{{"n", "3"}}));
    EXPECT_TRUE(schema_violation(kSchema, Json::object()));
    const Json list = Json::parse(R"({"type": "array", "minItems": 2, "items": {"enum": ["a", "b"]}})");
    EXPECT_FALSE(schema_violation(list, Json::array({"a", "b"})));
    EXPECT_TRUE(schema_violation(list, Json::array({"a"})));
    EXPECT_TRUE(schema_violation(list, Json::array({"a", "c"})));
}

TEST(Schema, ParseReplyToleratesFences) {
    EXPECT_EQ(parse_reply("```json\n{\"n\": 1}\n```"), (Json{{"n", 1}}));
    try {
        parse_reply("the answer is seven");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MalformedOutput);
    }
}

TEST(Transcript, KeyDependsOnTemplateTextAndOrdinal) {
    const auto k = transcript_key("story", "abc", 0);
    EXPECT_EQ(k.size(), 64u);
    EXPECT_EQ(k, transcript_key("story", "abc", 0));
    EXPECT_NE(k, transcript_key("story", "abc", 1));
    EXPECT_NE(k, transcript_key("storyx", "abc", 0));
    EXPECT_NE(transcript_key("a", "bc", 0), transcript_key("ab", "c", 0));
}

TEST(Transcript, SaveLoadRoundTrip) {
    Transcript t;
    t.append({transcript_key("probe", "x", 0), "probe", 0, CallKind::text, "x", Json{{"n", 1}}});
    t.append({transcript_key("img", "y", 0), "img", 0, CallKind::image, "y", Json{{"uri", "fixture://a.png"}}});
    const auto path = temp_path("transcript.json");
    t.save(path);
    const auto back = Transcript::load(path);
    EXPECT_EQ(back.entries(), t.entries());
    EXPECT_NE(back.find(t.entries()[1].key), nullptr);
    std::filesystem::remove(path);
}

TEST(Transcript, RejectsOtherSchemaVersions) {
    EXPECT_THROW(Transcript::from_json(Json{{"schema_version", 99}, {"entries", Json::array()}}), Error);
}

TEST(Gateway, RecordThenReplayGivesSameReplies) {
    const auto path = temp_path("record.json");
    std::filesystem::remove(path);
    Json canned{{"text", {{"probe", {R"({"n": 1})", R"({"n": 2})"}}}}};
    std::vector<Json> recorded;
    {
        Gateway gw(GatewayMode::record, std::make_unique<CannedProvider>(canned), {}, path);
        recorded.push_back(gw.complete(prompt("x"), kSchema).value);
        recorded.push_back(gw.complete(prompt("x"), kSchema).value);
        EXPECT_EQ(gw.provider_calls(), 2u);
    }
    Gateway replay(Transcript::load(path));
    EXPECT_EQ(replay.complete(prompt("x"), kSchema).value, recorded[0]);
    EXPECT_EQ(replay.complete(prompt("x"), kSchema).value, recorded[1]);
    EXPECT_EQ(replay.provider_calls(), 0u);
    try {
        replay.complete(prompt("x"), kSchema);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingFixture);
    }
    std::filesystem::remove(path);
}

TEST(Gateway, CorrelationIdIsDeterministic) {
    Json canned{{"text", {{"probe", {R"({"n": 1})"}}}}};
    auto a = duet::testing::canned_gateway(canned);
    auto b = duet::testing::canned_gateway(canned);
    EXPECT_EQ(a->complete(prompt("x"), kSchema).correlation_id, b->complete(prompt("x"), kSchema).correlation_id);
}

TEST(Gateway, SchemaViolationIsMalformedOutputAndStillRecorded) {
    auto gw = duet::testing::canned_gateway(Json{{"text", {{"probe", {R"({"n": "one"})"}}}}});
    try {
        gw->complete(prompt("x"), kSchema);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MalformedOutput);
    }
    EXPECT_EQ(gw->transcript().size(), 1u);
}

TEST(Gateway, ExhaustedCannedProviderIsProviderError) {
    auto gw = duet::testing::canned_gateway(Json::object());
    try {
        gw->complete(prompt("x"), kSchema);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ProviderError);
        EXPECT_TRUE(is_generation_failure(e));
        EXPECT_EQ(generation_unavailable(e).code(), ErrorCode::GenerationUnavailable);
        EXPECT_EQ(generation_unavailable(e).details().at("cause"), "ProviderError");
    }
}

TEST(Gateway, ReplayImageMissIsPlaceholder) {
    Gateway gw(Transcript{});
    const auto img = gw.generate_image(prompt("tiger"));
    EXPECT_TRUE(img.placeholder);
    EXPECT_EQ(img.uri.rfind("placeholder:image/", 0), 0u);
    EXPECT_EQ(img.uri, Gateway(Transcript{}).generate_image(prompt("tiger")).uri);
}

TEST(Gateway, ReplayOrdinalsAreIndependentAcrossConcurrentCallers) {
    Json canned{{"text", {{"probe", Json::array()}}}};
    for (int i = 0; i < 64; ++i) canned["text"]["probe"].push_back(Json{{"n", 1}}.dump());
    auto gw = duet::testing::canned_gateway(canned);
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&] {
            for (int i = 0; i < 16; ++i) gw->complete(prompt("x"), kSchema);
        });
    }
    for (auto& th : threads) th.join();
    const auto recorded = gw->transcript();
    std::set<int> ordinals;
    for (const auto& e : recorded.entries()) ordinals.insert(e.ordinal);
    EXPECT_EQ(ordinals.size(), 64u);
}

TEST(ProviderConfig, FileThenEnvironment) {
    const auto dir = temp_path("provider");
    std::filesystem::create_directories(dir);
    write_text_file_atomic(dir + "/provider.json",
                           R"({"provider": {"kind": "canned", "mode": "record", "canned_path": "c.json"}})");
    ::setenv("DUET_PROVIDER_MODEL", "tiny", 1);
    const auto config = ProviderConfig::load(dir + "/provider.json");
    ::unsetenv("DUET_PROVIDER_MODEL");
    EXPECT_EQ(config.kind, "canned");
    EXPECT_EQ(config.mode, GatewayMode::record);
    EXPECT_EQ(config.model, "tiny");
    EXPECT_EQ(std::filesystem::path(config.canned_path), std::filesystem::path(dir) / "c.json");
    std::filesystem::remove_all(dir);
}

// A local stand-in for a chat-completions endpoint exercises the live client.
TEST(HttpProvider, TalksToChatCompletionsEndpoint) {
    httplib::Server server;
    server.Post("/v1/chat/completions", [](const httplib::Request& req, httplib::Response& res) {
        const auto body = Json::parse(req.body);
        const std::string content = body.at("messages").at(0).at("content");
        const Json reply{{"choices", Json::array({{{"message", {{"content", Json{{"n", int(content.size())}}.dump()}}}}})}};
        res.set_content(reply.dump(), "application/json");
    });
    server.Post("/v1/images", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"data": [{"url": "https://img.example/tiger.png"}]})", "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread listener([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    ProviderConfig config;
    config.kind = "http";
    config.mode = GatewayMode::live;
    config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    config.image_endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/images";
    config.timeout_ms = 5000;
    const auto before = network_operations();
    Gateway gw(GatewayMode::live, std::make_unique<HttpProvider>(config));
    EXPECT_EQ(gw.complete(prompt("x"), kSchema).value, (Json{{"n", 5}}));
    EXPECT_EQ(gw.generate_image(prompt("tiger")).uri, "https://img.example/tiger.png");
    EXPECT_EQ(network_operations() - before, 2u);

    config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/missing";
    Gateway broken(GatewayMode::live, std::make_unique<HttpProvider>(config));
    try {
        broken.complete(prompt("x"), kSchema);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ProviderError);
    }
    server.stop();
    listener.join();
}
