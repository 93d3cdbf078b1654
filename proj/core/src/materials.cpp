#include "duet/materials.hpp"

#include <algorithm>
#include <set>

namespace duet::materials {

namespace {

// Grammatical glue that no exam wordlist bothers to list.
const std::set<std::string> kFunctionWords = {
    "a",    "an",   "the",  "is",   "are",  "was",  "were", "be",   "it",   "its",  "this", "that", "these",
    "those", "and", "or",   "but",  "to",   "of",   "in",   "on",   "at",   "for",  "with", "by",   "from",
    "as",   "you",  "your", "we",   "they", "he",   "she",  "i",    "me",   "my",   "our",  "their", "them",
    "his",  "her",  "do",   "does", "can",  "not",  "no",   "yes",  "so",   "very", "there", "here", "have",
    "has",  "like", "what", "who",  "where", "when", "how", "why",  "if",   "then", "also", "too",  "all",
    "some", "many", "much", "one",  "people", "的", "了", "是", "在", "和", "有", "也", "就", "都", "很",
    "这", "那", "个", "们", "吗", "呢", "吧", "着", "过", "会", "能", "要", "去", "来", "里", "上", "下",
};

const Json& material_schema() {
    static const Json schema = Json::parse(R"({
      "type": "object",
      "required": ["explanation"],
      "properties": {
        "explanation": {"type": "string", "minLength": 1},
        "cultural_analogy": {"type": "string"},
        "image_prompt": {"type": "string"},
        "difficulty": {"type": "string", "enum": ["A1", "A2", "B1", "B2", "C1", "C2"]}
      }
    })");
    return schema;
}

std::string language_name(Language lang) {
    return lang == Language::zh ? "Chinese" : "English";
}

}  // namespace

std::vector<std::string> words_outside_wordlist(const std::string& explanation, Language lang,
                                                const profile::ChildProfile& child,
                                                const characteristics::GuidelineSet& guidelines) {
    std::set<std::string> allowed;
    bool any_list = false;
    for (const auto& g : guidelines.applicable_to(child)) {
        if (g.kind != characteristics::GuidelineKind::exam_level || g.vocabulary.empty()) continue;
        if (std::find(g.languages.begin(), g.languages.end(), lang) == g.languages.end()) continue;
        any_list = true;
        for (const auto& w : g.vocabulary) {
            // Multi-character Chinese entries contribute each character, matching
            // the per-character tokenization.
            for (const auto& t : text::word_tokens(w)) allowed.insert(t);
        }
    }
    if (!any_list) return {};
    std::vector<std::string> out;
    for (const auto& t : text::word_tokens(explanation)) {
        if (allowed.count(t) || kFunctionWords.count(t)) continue;
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    }
    return out;
}

Material generate_material(const std::string& keyword_in, const profile::ChildProfile& child,
                           const std::string& child_description, const characteristics::GuidelineSet& guidelines,
                           gateway::Gateway& gw, const gateway::TemplateLibrary& templates,
                           std::string material_id) {
    const std::string keyword = text::collapse_whitespace(keyword_in);
    if (keyword.empty()) throw Error(ErrorCode::EmptyInput, "material keyword is blank");

    const auto prompt = templates.render("material",
                                         {{"keyword", keyword},
                                          {"child_profile", child_description},
                                          {"cultural_background", characteristics::cultural_background(child)},
                                          {"native_language", language_name(child.native_language)},
                                          {"proficiency", std::string(profile::to_string(child.proficiency))}});
    Json reply;
    try {
        reply = gw.complete(prompt, material_schema()).value;
    } catch (const Error& e) {
        if (!gateway::is_generation_failure(e)) throw;
        throw gateway::generation_unavailable(e);
    }

    Material m;
    m.material_id = std::move(material_id);
    m.keyword = keyword;
    m.target_child = child.child_id;
    m.explanation_text = text::trim(reply.at("explanation").get<std::string>());
    if (m.explanation_text.empty()) throw Error(ErrorCode::GenerationUnavailable, "material explanation is blank");
    const auto analogy = text::trim(optional_field<std::string>(reply, "cultural_analogy", ""));
    if (!analogy.empty()) m.cultural_analogy = analogy;
    if (reply.contains("difficulty")) m.difficulty = profile::cefr_from_string(reply.at("difficulty").get<std::string>());
    if (m.difficulty && *m.difficulty > child.proficiency) m.flags.push_back(kFlagAboveLevel);
    m.flagged_words = words_outside_wordlist(m.explanation_text, child.native_language, child, guidelines);
    if (!m.flagged_words.empty()) m.flags.push_back(kFlagOutsideWordlist);

    const auto image_prompt = text::trim(optional_field<std::string>(reply, "image_prompt", ""));
    if (image_prompt.empty()) {
        m.degraded = true;
        return m;
    }
    try {
        const auto rendered = templates.render("image", {{"style", "cartoon"}, {"image_prompt", image_prompt}});
        m.image = gw.generate_image(rendered, "cartoon");
    } catch (const Error& e) {
        if (!gateway::is_generation_failure(e)) throw;
        m.degraded = true;
    }
    return m;
}

void to_json(Json& j, MaterialStatus s) {
    j = s == MaterialStatus::proposed ? "proposed" : "presented";
}
void from_json(const Json& j, MaterialStatus& s) {
    const auto name = j.get<std::string>();
    if (name == "proposed") {
        s = MaterialStatus::proposed;
    } else if (name == "presented") {
        s = MaterialStatus::presented;
    } else {
        throw Error(ErrorCode::BadArguments, "unknown material status '" + name + "'");
    }
}

void to_json(Json& j, const Material& m) {
    j = Json{{"material_id", m.material_id},
             {"keyword", m.keyword},
             {"target_child", m.target_child},
             {"explanation_text", m.explanation_text},
             {"cultural_analogy", m.cultural_analogy},
             {"image", m.image},
             {"status", m.status},
             {"degraded", m.degraded},
             {"difficulty", m.difficulty},
             {"flags", m.flags},
             {"flagged_words", m.flagged_words}};
}
void from_json(const Json& j, Material& m) {
    m.material_id = required_field<std::string>(j, "material_id");
    m.keyword = required_field<std::string>(j, "keyword");
    m.target_child = required_field<std::string>(j, "target_child");
    m.explanation_text = required_field<std::string>(j, "explanation_text");
    m.cultural_analogy = optional_field<std::optional<std::string>>(j, "cultural_analogy", std::nullopt);
    m.image = optional_field<std::optional<gateway::ImageDescriptor>>(j, "image", std::nullopt);
    m.status = required_field<MaterialStatus>(j, "status");
    m.degraded = optional_field<bool>(j, "degraded", false);
    m.difficulty = optional_field<std::optional<profile::Cefr>>(j, "difficulty", std::nullopt);
    m.flags = optional_field<std::vector<std::string>>(j, "flags", {});
    m.flagged_words = optional_field<std::vector<std::string>>(j, "flagged_words", {});
}

}  // namespace duet::materials
