#include "duet/questions.hpp"

#include <algorithm>
#include <set>

namespace duet::questions {

namespace {

constexpr std::array<std::string_view, 7> kAttributeNames = {
    "character", "setting", "action", "feeling", "causal_relationship", "outcome_resolution", "prediction"};
constexpr std::array<std::string_view, 4> kStageNames = {"cloze", "adaptation", "extension_teller",
                                                         "extension_listener"};
constexpr std::array<std::string_view, 4> kStatusNames = {"proposed", "selected", "answered", "skipped"};
constexpr std::array<std::string_view, 3> kAnchorNames = {"blank", "paragraph", "utterance"};

template <typename E, std::size_t N>
E enum_from(const std::array<std::string_view, N>& names, std::string_view s, const char* what) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == s) return static_cast<E>(i);
    }
    throw Error(ErrorCode::BadArguments, std::string("unknown ") + what + " '" + std::string(s) + "'");
}

std::string language_name(Language lang) {
    return lang == Language::zh ? "Chinese" : "English";
}

std::string attribute_list() {
    std::string out;
    for (auto a : all_attributes()) {
        if (!out.empty()) out += ", ";
        std::string name(to_string(a));
        std::replace(name.begin(), name.end(), '_', ' ');
        out += name;
    }
    return out;
}

std::string story_text(const std::vector<story::Paragraph>& paragraphs) {
    std::string out;
    for (const auto& p : paragraphs) {
        out += "[" + std::to_string(p.index) + ", " + std::string(to_string(p.language)) + "] " + p.text + "\n";
    }
    return out;
}

const Json& question_list_schema() {
    static const Json schema = Json::parse(R"({
      "type": "object",
      "required": ["questions"],
      "properties": {
        "questions": {
          "type": "array",
          "items": {
            "type": "object",
            "required": ["text"],
            "properties": {
              "text": {"type": "string"},
              "attribute": {"type": "string"},
              "explicitness": {"type": "string"}
            }
          }
        }
      }
    })");
    return schema;
}

const Json& extension_schema() {
    static const Json schema = [] {
        const Json list = question_list_schema().at("properties").at("questions");
        return Json{{"type", "object"},
                    {"required", {"teller", "listener"}},
                    {"properties", {{"teller", list}, {"listener", list}}}};
    }();
    return schema;
}

struct Candidate {
    std::string text;
    Attribute attribute;
    std::optional<Explicitness> explicitness;
};

/// Drops entries with empty text or an attribute outside the closed set.
std::vector<Candidate> parse_candidates(const Json& list) {
    std::vector<Candidate> out;
    for (const auto& item : list) {
        const std::string t = text::collapse_whitespace(item.at("text").get<std::string>());
        if (t.empty()) continue;
        const auto attr = try_attribute(optional_field<std::string>(item, "attribute", ""));
        if (!attr) continue;
        std::optional<Explicitness> ex;
        const auto ex_name = text::ascii_lower(optional_field<std::string>(item, "explicitness", ""));
        if (ex_name == "explicit") ex = Explicitness::ex;
        if (ex_name == "implicit") ex = Explicitness::im;
        out.push_back({t, *attr, ex});
    }
    return out;
}

GeneratedQuestion make_question(const Candidate& c, QuestionStage stage, Explicitness ex, const ChildProfile& child,
                                Anchor anchor) {
    GeneratedQuestion q;
    q.spec = {stage, c.attribute, ex, child.child_id, std::move(anchor)};
    q.text = c.text;
    q.language = child.learning_language;
    return q;
}

bool has_text(const std::vector<GeneratedQuestion>& qs, const std::string& t) {
    return std::any_of(qs.begin(), qs.end(), [&](const GeneratedQuestion& q) { return q.text == t; });
}

Json call(gateway::Gateway& gw, const gateway::RenderedPrompt& prompt, const Json& schema) {
    try {
        return gw.complete(prompt, schema).value;
    } catch (const Error& e) {
        if (!gateway::is_generation_failure(e)) throw;
        throw gateway::generation_unavailable(e);
    }
}

}  // namespace

const std::array<Attribute, 7>& all_attributes() {
    static const std::array<Attribute, 7> attrs = {Attribute::character,           Attribute::setting,
                                                   Attribute::action,              Attribute::feeling,
                                                   Attribute::causal_relationship, Attribute::outcome_resolution,
                                                   Attribute::prediction};
    return attrs;
}

std::string_view to_string(Attribute a) {
    return kAttributeNames[static_cast<std::size_t>(a)];
}

std::optional<Attribute> try_attribute(std::string_view name) {
    std::string folded = text::ascii_lower(text::trim(name));
    std::replace(folded.begin(), folded.end(), ' ', '_');
    std::replace(folded.begin(), folded.end(), '-', '_');
    for (std::size_t i = 0; i < kAttributeNames.size(); ++i) {
        if (kAttributeNames[i] == folded) return static_cast<Attribute>(i);
    }
    return std::nullopt;
}

Attribute attribute_from_string(std::string_view name) {
    if (auto a = try_attribute(name)) return *a;
    throw Error(ErrorCode::BadArguments, "unknown attribute '" + std::string(name) + "'");
}

std::string_view to_string(Explicitness e) {
    return e == Explicitness::ex ? "explicit" : "implicit";
}

Explicitness explicitness_from_string(std::string_view name) {
    if (name == "explicit") return Explicitness::ex;
    if (name == "implicit") return Explicitness::im;
    throw Error(ErrorCode::BadArguments, "unknown explicitness '" + std::string(name) + "'");
}

std::string_view to_string(QuestionStage s) {
    return kStageNames[static_cast<std::size_t>(s)];
}

std::string_view to_string(QuestionStatus s) {
    return kStatusNames[static_cast<std::size_t>(s)];
}

std::string Anchor::label() const {
    switch (kind) {
        case AnchorKind::blank: return "(" + std::to_string(index) + ")";
        case AnchorKind::paragraph: return "paragraph " + std::to_string(index + 1);
        case AnchorKind::utterance: return utterance_id;
    }
    return {};
}

AnchorKind anchor_kind_for(QuestionStage stage) {
    switch (stage) {
        case QuestionStage::cloze: return AnchorKind::blank;
        case QuestionStage::adaptation: return AnchorKind::paragraph;
        default: return AnchorKind::utterance;
    }
}

// ---------------------------------------------------------------------------

std::vector<GeneratedQuestion> generate_cloze_questions(const story::ClozeStory& cloze, int blank_index,
                                                        const ChildProfile& child, const std::string& child_description,
                                                        gateway::Gateway& gw, const gateway::TemplateLibrary& templates,
                                                        int count) {
    const auto& blank = cloze.blank(blank_index);
    const auto prompt = templates.render("question_cloze",
                                         {{"count", std::to_string(count)},
                                          {"child_profile", child_description},
                                          {"language", language_name(child.learning_language)},
                                          {"context", story::render_cloze_paragraph(cloze, blank.paragraph_index)},
                                          {"target_word", blank.target_word},
                                          {"attribute", attribute_list()},
                                          {"ex_or_im", "explicit"}});
    std::vector<GeneratedQuestion> out;
    for (int attempt = 0; attempt < kMaxAttempts && static_cast<int>(out.size()) < count; ++attempt) {
        const Json reply = call(gw, prompt, question_list_schema());
        for (const auto& c : parse_candidates(reply.at("questions"))) {
            if (text::contains_token(c.text, blank.target_word) || has_text(out, c.text)) continue;
            out.push_back(make_question(c, QuestionStage::cloze, Explicitness::ex, child,
                                        {AnchorKind::blank, blank_index, {}}));
        }
    }
    if (static_cast<int>(out.size()) < count) {
        throw Error(ErrorCode::GenerationUnavailable,
                    "only " + std::to_string(out.size()) + " usable cloze questions for blank (" +
                        std::to_string(blank_index) + ")");
    }
    return out;
}

std::vector<GeneratedQuestion> generate_adaptation_questions(const std::vector<story::Paragraph>& story,
                                                             int paragraph_index, const ChildProfile& child,
                                                             const std::string& child_description,
                                                             gateway::Gateway& gw,
                                                             const gateway::TemplateLibrary& templates) {
    if (paragraph_index < 0 || paragraph_index >= static_cast<int>(story.size())) {
        throw Error(ErrorCode::OutOfRange, "story has no paragraph " + std::to_string(paragraph_index));
    }
    const auto prompt = templates.render("question_adaptation",
                                         {{"child_profile", child_description},
                                          {"language", language_name(child.learning_language)},
                                          {"story", story_text(story)},
                                          {"paragraph", story[paragraph_index].text},
                                          {"attribute", attribute_list()},
                                          {"ex_or_im", "explicit, implicit"},
                                          {"count", "1"}});
    std::vector<GeneratedQuestion> out;
    for (int attempt = 0; attempt < kMaxAttempts && !covers_matrix(out); ++attempt) {
        const Json reply = call(gw, prompt, question_list_schema());
        for (const auto& c : parse_candidates(reply.at("questions"))) {
            if (!c.explicitness || has_text(out, c.text)) continue;
            out.push_back(make_question(c, QuestionStage::adaptation, *c.explicitness, child,
                                        {AnchorKind::paragraph, paragraph_index, {}}));
        }
    }
    if (!covers_matrix(out)) {
        throw Error(ErrorCode::GenerationUnavailable, "adaptation questions for paragraph " +
                                                          std::to_string(paragraph_index) +
                                                          " do not cover every attribute and question type");
    }
    return out;
}

ExtensionQuestions generate_extension_questions(const std::vector<story::Paragraph>& story,
                                                const std::string& utterance, const std::string& utterance_id,
                                                const ChildProfile& teller, const std::string& teller_description,
                                                const ChildProfile& listener, const std::string& listener_description,
                                                gateway::Gateway& gw, const gateway::TemplateLibrary& templates) {
    const auto prompt = templates.render("question_extension",
                                         {{"teller_profile", teller_description},
                                          {"teller_language", language_name(teller.learning_language)},
                                          {"listener_profile", listener_description},
                                          {"listener_language", language_name(listener.learning_language)},
                                          {"story", story_text(story)},
                                          {"utterance", utterance},
                                          {"attribute", attribute_list()},
                                          {"ex_or_im", "implicit for the Storyteller, explicit for the Storylistener"},
                                          {"count", std::to_string(kExtensionCount)}});
    ExtensionQuestions out;
    const Anchor anchor{AnchorKind::utterance, 0, utterance_id};
    for (int attempt = 0; attempt < kMaxAttempts && (out.teller.empty() || out.listener.empty()); ++attempt) {
        const Json reply = call(gw, prompt, extension_schema());
        for (const auto& c : parse_candidates(reply.at("teller"))) {
            if (has_text(out.teller, c.text)) continue;
            out.teller.push_back(make_question(c, QuestionStage::extension_teller, Explicitness::im, teller, anchor));
        }
        for (const auto& c : parse_candidates(reply.at("listener"))) {
            if (has_text(out.listener, c.text)) continue;
            out.listener.push_back(
                make_question(c, QuestionStage::extension_listener, Explicitness::ex, listener, anchor));
        }
    }
    if (out.teller.empty() || out.listener.empty()) {
        throw Error(ErrorCode::GenerationUnavailable, "extension questions missing for utterance " + utterance_id);
    }
    return out;
}

std::map<Attribute, std::vector<const GeneratedQuestion*>> group_by_attribute(
    const std::vector<GeneratedQuestion>& questions) {
    std::map<Attribute, std::vector<const GeneratedQuestion*>> out;
    for (auto a : all_attributes()) out[a];
    for (const auto& q : questions) out[q.spec.attribute].push_back(&q);
    return out;
}

bool covers_matrix(const std::vector<GeneratedQuestion>& questions) {
    std::set<Attribute> attrs;
    std::set<Explicitness> kinds;
    for (const auto& q : questions) {
        attrs.insert(q.spec.attribute);
        kinds.insert(q.spec.explicitness);
    }
    return attrs.size() == all_attributes().size() && kinds.size() == 2;
}

// ---------------------------------------------------------------------------

void to_json(Json& j, Attribute a) {
    j = std::string(to_string(a));
}
void from_json(const Json& j, Attribute& a) {
    a = attribute_from_string(j.get<std::string>());
}
void to_json(Json& j, Explicitness e) {
    j = std::string(to_string(e));
}
void from_json(const Json& j, Explicitness& e) {
    e = explicitness_from_string(j.get<std::string>());
}
void to_json(Json& j, QuestionStage s) {
    j = std::string(to_string(s));
}
void from_json(const Json& j, QuestionStage& s) {
    s = enum_from<QuestionStage>(kStageNames, j.get<std::string>(), "question stage");
}
void to_json(Json& j, QuestionStatus s) {
    j = std::string(to_string(s));
}
void from_json(const Json& j, QuestionStatus& s) {
    s = enum_from<QuestionStatus>(kStatusNames, j.get<std::string>(), "question status");
}

void to_json(Json& j, const Anchor& a) {
    j = Json{{"kind", kAnchorNames[static_cast<std::size_t>(a.kind)]}, {"label", a.label()}};
    if (a.kind == AnchorKind::utterance) {
        j["utterance_id"] = a.utterance_id;
    } else {
        j["index"] = a.index;
    }
}
void from_json(const Json& j, Anchor& a) {
    a.kind = enum_from<AnchorKind>(kAnchorNames, required_field<std::string>(j, "kind"), "anchor kind");
    a.index = optional_field<int>(j, "index", 0);
    a.utterance_id = optional_field<std::string>(j, "utterance_id", "");
}

void to_json(Json& j, const QuestionSpec& s) {
    j = Json{{"stage", s.stage},
             {"attribute", s.attribute},
             {"explicitness", s.explicitness},
             {"target_child", s.target_child},
             {"anchor", s.anchor}};
}
void from_json(const Json& j, QuestionSpec& s) {
    s.stage = required_field<QuestionStage>(j, "stage");
    s.attribute = required_field<Attribute>(j, "attribute");
    s.explicitness = required_field<Explicitness>(j, "explicitness");
    s.target_child = required_field<std::string>(j, "target_child");
    s.anchor = required_field<Anchor>(j, "anchor");
}

void to_json(Json& j, const GeneratedQuestion& q) {
    j = Json{{"question_id", q.question_id}, {"spec", q.spec},     {"text", q.text},
             {"language", q.language},       {"status", q.status}, {"coordinator_authored", q.coordinator_authored}};
}
void from_json(const Json& j, GeneratedQuestion& q) {
    q.question_id = required_field<std::string>(j, "question_id");
    q.spec = required_field<QuestionSpec>(j, "spec");
    q.text = required_field<std::string>(j, "text");
    q.language = required_field<Language>(j, "language");
    q.status = required_field<QuestionStatus>(j, "status");
    q.coordinator_authored = optional_field<bool>(j, "coordinator_authored", false);
}

}  // namespace duet::questions
