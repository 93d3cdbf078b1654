#include "oracle.hpp"

#include "world.hpp"

#include <filesystem>
#include <fstream>

namespace duet::testing {

namespace {

Json read_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    return Json::parse(in);
}

analytics::Codes codes_of(const Json& j) {
    analytics::Codes c;
    for (const auto& [k, v] : j.items()) c.set(analytics::code_dimension_from_string(k), v.get<int>());
    return c;
}

}  // namespace

AnalyticsOracle load_analytics_oracle() {
    const auto dir = std::filesystem::path(fixtures_dir()) / "analytics_oracle";
    const Json input = read_json(dir / "responses.json");
    AnalyticsOracle o;
    o.children = input.at("children").get<std::vector<std::string>>();
    for (const auto& r : input.at("responses")) {
        analytics::ResponseRecord rec;
        rec.record_id = r.at("record_id").get<std::string>();
        rec.question_id = "q-" + rec.record_id;
        rec.child_id = r.at("child_id").get<std::string>();
        rec.attribute = questions::attribute_from_string(r.at("attribute").get<std::string>());
        rec.question_text = r.at("question_text").get<std::string>();
        rec.transcript = r.at("transcript").get<std::string>();
        rec.tokens = analytics::tokenize_response(rec.transcript);
        if (r.contains("manual")) rec.manual_codes = codes_of(r["manual"]);
        if (r.contains("suggested")) rec.auto_codes = codes_of(r["suggested"]);
        o.records.push_back(std::move(rec));
    }
    o.expected = read_json(dir / "expected.json").at("metrics");
    return o;
}

std::vector<std::string> compare_to_oracle(const analytics::EngagementMetrics& m, const Json& e) {
    std::vector<std::string> out;
    auto check = [&](const std::string& field, const Json& got, const Json& want) {
        if (got != want) out.push_back(m.child_id + "." + field + ": got " + got.dump() + ", want " + want.dump());
    };
    check("questions_answered", m.questions_answered, e.at("questions_answered"));
    check("productivity", m.productivity, e.at("productivity"));
    check("lexical_diversity", m.lexical_diversity, e.at("lexical_diversity"));
    check("topical_relevance_mean", m.topical_relevance_mean.fraction(), e.at("topical_relevance_mean"));
    check("intelligibility_mean", m.intelligibility_mean.fraction(), e.at("intelligibility_mean"));
    check("accuracy_mean", m.accuracy_mean.fraction(), e.at("accuracy_mean"));
    Json per = Json::object();
    for (const auto& [a, n] : m.per_attribute_counts) per[std::string(questions::to_string(a))] = n;
    check("per_attribute_counts", per, e.at("per_attribute_counts"));
    check("suggested_counts", Json(m.suggested_counts), e.at("suggested_counts"));
    return out;
}

}  // namespace duet::testing
