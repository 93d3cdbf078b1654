#include "duet/story.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace duet::story {

namespace {

constexpr std::array<std::string_view, 5> kStageNames = {"exposition", "rising_action", "climax", "falling_action",
                                                         "resolution"};

std::string language_name(Language lang) {
    return lang == Language::zh ? "Chinese" : "English";
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

Json span_to_json(const text::Span& s) {
    return Json::array({s.begin, s.end});
}

text::Span span_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::BadArguments, "span must be [begin, end]");
    return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

std::string replace_spans(const std::string& original, std::vector<std::pair<text::Span, std::string>> edits) {
    std::sort(edits.begin(), edits.end(),
              [](const auto& a, const auto& b) { return a.first.begin > b.first.begin; });
    std::string out = original;
    for (const auto& [span, replacement] : edits) out.replace(span.begin, span.size(), replacement);
    return out;
}

std::vector<StageRange> ranges_from_stages(const std::vector<Stage>& stages) {
    std::vector<StageRange> out;
    for (int i = 0; i < static_cast<int>(stages.size()); ++i) {
        if (!out.empty() && out.back().stage == stages[i]) {
            out.back().last = i;
        } else {
            out.push_back({stages[i], i, i});
        }
    }
    return out;
}

}  // namespace

const std::array<Stage, 5>& all_stages() {
    static const std::array<Stage, 5> stages = {Stage::exposition, Stage::rising_action, Stage::climax,
                                                Stage::falling_action, Stage::resolution};
    return stages;
}

std::string_view to_string(Stage s) {
    return kStageNames[static_cast<std::size_t>(s)];
}

Stage stage_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kStageNames.size(); ++i) {
        if (kStageNames[i] == name) return static_cast<Stage>(i);
    }
    throw Error(ErrorCode::BadArguments, "unknown narrative stage '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

std::vector<std::string> ValidationReport::missing_words() const {
    std::vector<std::string> out;
    for (const auto& i : issues) {
        if (i.code == "missing_word") out.push_back(i.word);
    }
    return out;
}

bool alternates(const std::vector<Paragraph>& paragraphs) {
    for (std::size_t i = 1; i < paragraphs.size(); ++i) {
        if (paragraphs[i].language == paragraphs[i - 1].language) return false;
    }
    return true;
}

ValidationReport validate_framework(const StoryFramework& fw, const TargetWordSet& words,
                                    Language first_paragraph_language) {
    ValidationReport report;
    auto issue = [&](std::string code, std::string message, std::optional<int> paragraph = {}, std::string word = {}) {
        report.issues.push_back({std::move(code), std::move(message), paragraph, std::move(word)});
    };
    const int n = static_cast<int>(fw.paragraphs.size());

    if (n < profile::kMinParagraphs || n > profile::kMaxParagraphs) {
        issue("paragraph_count", "framework has " + std::to_string(n) + " paragraphs; expected " +
                                     std::to_string(profile::kMinParagraphs) + "-" +
                                     std::to_string(profile::kMaxParagraphs));
    }
    for (const auto& p : fw.paragraphs) {
        if (text::trim(p.text).empty()) issue("empty_text", "paragraph " + std::to_string(p.index) + " is empty", p.index);
    }
    if (n > 0 && fw.paragraphs.front().language != first_paragraph_language) {
        issue("first_language", "first paragraph must be " + std::string(to_string(first_paragraph_language)), 0);
    }
    for (int i = 1; i < n; ++i) {
        if (fw.paragraphs[i].language == fw.paragraphs[i - 1].language) {
            issue("alternation",
                  "paragraphs " + std::to_string(i - 1) + " and " + std::to_string(i) + " share a language", i);
        }
    }

    std::vector<std::string> unplaced;
    plan_blanks(fw.paragraphs, words, &unplaced);
    for (const auto& w : unplaced) {
        issue("missing_word", "target word '" + w + "' does not appear in a paragraph of its language", {}, w);
    }

    // Stage ranges must tile [0, n) with stages in strictly increasing order.
    int expected_first = 0;
    int previous = -1;
    std::set<Stage> present;
    for (const auto& r : fw.narrative_stages) {
        if (r.first != expected_first || r.last < r.first) {
            issue("stage_coverage", "stage ranges do not tile the paragraphs");
            break;
        }
        expected_first = r.last + 1;
        if (static_cast<int>(r.stage) <= previous) {
            issue("stage_order", "stage '" + std::string(to_string(r.stage)) + "' is out of narrative order", r.first);
        }
        previous = static_cast<int>(r.stage);
        present.insert(r.stage);
    }
    if (expected_first != n && (report.issues.empty() || report.issues.back().code != "stage_coverage")) {
        issue("stage_coverage", "stage ranges do not cover every paragraph");
    }
    if (n >= static_cast<int>(all_stages().size()) && present.size() < all_stages().size()) {
        for (auto s : all_stages()) {
            if (!present.count(s)) issue("stage_coverage", "stage '" + std::string(to_string(s)) + "' is missing");
        }
    }
    return report;
}

// ---------------------------------------------------------------------------

bool is_generic_premise(const characteristics::CommonSummary& common) {
    return common.empty();
}

gateway::RenderedPrompt build_story_prompt(const characteristics::CommonSummary& common, const TargetWordSet& words,
                                           const SessionConfig& config, const gateway::TemplateLibrary& templates) {
    std::ostringstream premise;
    if (is_generic_premise(common)) {
        premise << "No shared characteristics were identified; write a story any two children would enjoy.\n";
    } else {
        premise << "What the two children have in common:\n";
        for (const auto& s : common.sentences) premise << "- " << s << "\n";
    }
    for (auto lang : {Language::zh, Language::en}) {
        const auto& list = words.words(lang);
        if (list.empty()) continue;
        premise << language_name(lang) << " target words: " << join(list, ", ") << "\n";
    }
    profile::Cefr lowest = profile::Cefr::C2;
    for (const auto& c : config.children) {
        premise << c.display_name << " is learning " << language_name(c.learning_language) << " at CEFR "
                << profile::to_string(c.proficiency) << ".\n";
        lowest = std::min(lowest, c.proficiency);
    }
    premise << "Keep vocabulary and sentence length at CEFR " << profile::to_string(lowest)
            << ", the lower of the two levels.";

    std::ostringstream instruction;
    instruction << "Write exactly " << config.paragraph_count
                << " paragraphs following the Freytag pyramid: exposition, rising action, climax, falling action, "
                   "resolution. Label each paragraph with its stage; stages must appear in that order and each "
                   "stage must be used at least once.\n";
    instruction << "Paragraphs alternate between Chinese (zh) and English (en). The first paragraph is in "
                << language_name(config.first_paragraph_language) << " ("
                << to_string(config.first_paragraph_language) << ").\n";
    instruction << "Use every Chinese target word in a Chinese paragraph and every English target word in an "
                   "English paragraph, exactly as written.";
    std::vector<std::string> avoid;
    for (const auto& c : config.children) {
        for (const auto& t : c.dislikes()) avoid.push_back(t.value);
    }
    if (!avoid.empty()) instruction << "\nAvoid: " << join(avoid, ", ") << ".";

    return templates.render("story", {{"premise", premise.str()}, {"instruction", instruction.str()}});
}

const Json& story_output_schema() {
    static const Json schema = Json::parse(R"({
      "type": "object",
      "required": ["paragraphs"],
      "properties": {
        "paragraphs": {
          "type": "array",
          "minItems": 1,
          "items": {
            "type": "object",
            "required": ["language", "text", "stage"],
            "properties": {
              "language": {"type": "string", "enum": ["zh", "en"]},
              "text": {"type": "string"},
              "stage": {"type": "string", "enum": ["exposition", "rising_action", "climax", "falling_action", "resolution"]}
            }
          }
        }
      }
    })");
    return schema;
}

StoryFramework parse_framework(const Json& reply, std::string framework_id) {
    if (auto violation = gateway::schema_violation(story_output_schema(), reply)) {
        throw Error(ErrorCode::MalformedOutput, "story reply: " + *violation, Json{{"raw", reply.dump()}});
    }
    StoryFramework fw;
    fw.framework_id = std::move(framework_id);
    std::vector<Stage> stages;
    int index = 0;
    for (const auto& item : reply.at("paragraphs")) {
        Paragraph p;
        p.index = index++;
        p.language = language_from_string(item.at("language").get<std::string>());
        p.text = text::trim(item.at("text").get<std::string>());
        fw.paragraphs.push_back(std::move(p));
        stages.push_back(stage_from_string(item.at("stage").get<std::string>()));
    }
    fw.narrative_stages = ranges_from_stages(stages);
    return fw;
}

FrameworkDraft generate_framework(const gateway::RenderedPrompt& prompt, gateway::Gateway& gw,
                                  const TargetWordSet& words, Language first_paragraph_language,
                                  std::string framework_id) {
    auto reply = gw.complete(prompt, story_output_schema());
    FrameworkDraft draft;
    draft.framework = parse_framework(reply.value, std::move(framework_id));
    draft.report = validate_framework(draft.framework, words, first_paragraph_language);
    draft.correlation_id = reply.correlation_id;
    return draft;
}

StoryFramework edit_paragraph(StoryFramework fw, int index, const std::string& new_text) {
    if (fw.status != FrameworkStatus::draft) throw Error(ErrorCode::WrongStatus, "framework is already confirmed");
    if (index < 0 || index >= static_cast<int>(fw.paragraphs.size())) {
        throw Error(ErrorCode::OutOfRange, "framework has no paragraph " + std::to_string(index));
    }
    const std::string cleaned = text::trim(new_text);
    if (cleaned.empty()) throw Error(ErrorCode::EmptyInput, "paragraph text is blank");
    fw.paragraphs[index].text = cleaned;
    fw.paragraphs[index].author = {AuthorKind::coordinator_edit, {}};
    ++fw.revision;
    return fw;
}

StoryFramework confirm_framework(StoryFramework fw, const TargetWordSet& words, Language first_paragraph_language) {
    if (fw.status != FrameworkStatus::draft) throw Error(ErrorCode::WrongStatus, "framework is already confirmed");
    const auto report = validate_framework(fw, words, first_paragraph_language);
    if (!report.ok()) {
        std::vector<std::string> what;
        for (const auto& i : report.issues) what.push_back(i.word.empty() ? i.code : i.word);
        throw Error(ErrorCode::ValidationFailed, join(what, ", "), Json(report));
    }
    fw.status = FrameworkStatus::confirmed;
    return fw;
}

// ---------------------------------------------------------------------------

const Blank& ClozeStory::blank(int blank_index) const {
    for (const auto& b : blanks) {
        if (b.blank_index == blank_index) return b;
    }
    throw Error(ErrorCode::UnknownBlank, "no blank (" + std::to_string(blank_index) + ")");
}

std::vector<const Blank*> ClozeStory::blanks_of(const std::string& child_id) const {
    std::vector<const Blank*> out;
    for (const auto& b : blanks) {
        if (b.assigned_child == child_id) out.push_back(&b);
    }
    return out;
}

std::vector<Blank> plan_blanks(const std::vector<Paragraph>& paragraphs, const TargetWordSet& words,
                               std::vector<std::string>* unplaced) {
    std::map<int, std::vector<text::Span>> claimed;
    std::vector<Blank> out;
    for (auto lang : {Language::zh, Language::en}) {
        std::vector<std::string> ordered = words.words(lang);
        std::stable_sort(ordered.begin(), ordered.end(),
                         [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
        for (const auto& word : ordered) {
            bool placed = false;
            for (const auto& p : paragraphs) {
                if (p.language != lang) continue;
                auto& taken = claimed[p.index];
                for (const auto& span : text::find_all_words(p.text, word, lang)) {
                    const bool free = std::none_of(taken.begin(), taken.end(),
                                                   [&](const text::Span& s) { return s.overlaps(span); });
                    if (!free) continue;
                    taken.push_back(span);
                    Blank b;
                    b.paragraph_index = p.index;
                    b.char_span = span;
                    b.target_word = word;
                    b.language = lang;
                    out.push_back(std::move(b));
                    placed = true;
                    break;
                }
                if (placed) break;
            }
            if (!placed) {
                if (!unplaced) throw Error(ErrorCode::WordNotFound, "target word '" + word + "' not found");
                unplaced->push_back(word);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Blank& a, const Blank& b) {
        return std::tie(a.paragraph_index, a.char_span.begin) < std::tie(b.paragraph_index, b.char_span.begin);
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].blank_index = static_cast<int>(i) + 1;
    return out;
}

ClozeStory to_cloze(const StoryFramework& confirmed, const TargetWordSet& words) {
    if (confirmed.status != FrameworkStatus::confirmed) {
        throw Error(ErrorCode::WrongStatus, "framework not confirmed");
    }
    ClozeStory cloze;
    cloze.base = confirmed;
    cloze.blanks = plan_blanks(confirmed.paragraphs, words);
    cloze.status = cloze.blanks.empty() ? ClozeStatus::completed : ClozeStatus::open;
    return cloze;
}

ClozeStory assign_blanks(ClozeStory cloze, const SessionConfig& config) {
    if (cloze.blanks.empty()) return cloze;
    const auto& first_paragraph = cloze.base.paragraphs.at(cloze.blanks.front().paragraph_index);
    const std::string first = config.learner_of(first_paragraph.language).child_id;
    const std::string second = config.other_child(first).child_id;
    for (std::size_t i = 0; i < cloze.blanks.size(); ++i) {
        cloze.blanks[i].assigned_child = i % 2 == 0 ? first : second;
    }
    return cloze;
}

ClozeStory fill_blank(ClozeStory cloze, int blank_index, const std::string& answer_text, const std::string& filled_by,
                      bool approved) {
    auto it = std::find_if(cloze.blanks.begin(), cloze.blanks.end(),
                           [&](const Blank& b) { return b.blank_index == blank_index; });
    if (it == cloze.blanks.end()) throw Error(ErrorCode::UnknownBlank, "no blank (" + std::to_string(blank_index) + ")");
    if (it->fill && it->fill->approved) {
        throw Error(ErrorCode::AlreadyFilled, "blank (" + std::to_string(blank_index) + ") is already filled");
    }
    const std::string answer = text::trim(answer_text);
    if (answer.empty()) throw Error(ErrorCode::EmptyInput, "answer is blank");
    it->fill = BlankFill{answer, filled_by, approved};
    const bool done = std::all_of(cloze.blanks.begin(), cloze.blanks.end(),
                                  [](const Blank& b) { return b.fill && b.fill->approved; });
    cloze.status = done ? ClozeStatus::completed : ClozeStatus::open;
    return cloze;
}

std::string render_cloze_paragraph(const ClozeStory& cloze, int paragraph_index) {
    const auto& p = cloze.base.paragraphs.at(paragraph_index);
    std::vector<std::pair<text::Span, std::string>> edits;
    for (const auto& b : cloze.blanks) {
        if (b.paragraph_index != paragraph_index) continue;
        edits.push_back({b.char_span, b.fill ? b.fill->answer_text : "(" + std::to_string(b.blank_index) + ")____"});
    }
    return replace_spans(p.text, std::move(edits));
}

std::vector<Paragraph> reconstruct(const ClozeStory& cloze) {
    std::vector<Paragraph> out = cloze.base.paragraphs;
    for (auto& p : out) {
        std::vector<std::pair<text::Span, std::string>> edits;
        for (const auto& b : cloze.blanks) {
            if (b.paragraph_index == p.index && b.fill) edits.push_back({b.char_span, b.fill->answer_text});
        }
        p.text = replace_spans(p.text, std::move(edits));
    }
    return out;
}

// ---------------------------------------------------------------------------

Storybook storybook_from_cloze(const ClozeStory& cloze) {
    Storybook book;
    book.base = cloze.base.paragraphs;
    for (const auto& b : cloze.blanks) {
        if (!b.fill) continue;
        ProvenanceEntry e;
        e.kind = EditKind::fill;
        e.paragraph_index = b.paragraph_index;
        e.text = b.fill->answer_text;
        e.span = b.char_span;
        e.blank_index = b.blank_index;
        e.child_id = b.fill->filled_by;
        book.provenance.push_back(std::move(e));
    }
    book.paragraphs = replay_provenance(book.base, book.provenance);
    return book;
}

Storybook apply_adaptation_edit(Storybook book, int paragraph_index, const std::string& new_text,
                                const std::string& rationale) {
    if (paragraph_index < 0 || paragraph_index >= static_cast<int>(book.paragraphs.size())) {
        throw Error(ErrorCode::OutOfRange, "storybook has no paragraph " + std::to_string(paragraph_index));
    }
    const std::string cleaned = text::trim(new_text);
    if (cleaned.empty()) throw Error(ErrorCode::EmptyInput, "paragraph text is blank");
    ProvenanceEntry e;
    e.kind = EditKind::adapt;
    e.paragraph_index = paragraph_index;
    e.text = cleaned;
    e.rationale = rationale;
    book.provenance.push_back(e);
    book.paragraphs[paragraph_index].text = cleaned;
    book.paragraphs[paragraph_index].author = {AuthorKind::coordinator_edit, {}};
    return book;
}

Storybook append_extension(Storybook book, const std::string& child_id, Language language, const std::string& text_in,
                           const std::string& utterance_id) {
    const std::string cleaned = text::trim(text_in);
    if (cleaned.empty()) throw Error(ErrorCode::EmptyInput, "extension text is blank");
    if (!book.paragraphs.empty() && book.paragraphs.back().language == language) {
        throw Error(ErrorCode::AlternationViolation,
                    "previous paragraph is already " + std::string(to_string(language)));
    }
    ProvenanceEntry e;
    e.kind = EditKind::extend;
    e.paragraph_index = static_cast<int>(book.paragraphs.size());
    e.text = cleaned;
    e.child_id = child_id;
    e.utterance_id = utterance_id;
    e.language = language;
    book.provenance.push_back(e);
    book.paragraphs.push_back({e.paragraph_index, language, cleaned, {AuthorKind::child_extension, child_id}});
    return book;
}

std::vector<Paragraph> replay_provenance(const std::vector<Paragraph>& base,
                                         const std::vector<ProvenanceEntry>& provenance) {
    std::vector<Paragraph> out = base;
    // Fill spans refer to the confirmed text, so all fills land before any
    // later edit; the log always records them first.
    std::map<int, std::vector<std::pair<text::Span, std::string>>> fills;
    for (const auto& e : provenance) {
        if (e.kind == EditKind::fill) fills[e.paragraph_index].push_back({e.span, e.text});
    }
    for (auto& [index, edits] : fills) {
        auto& p = out.at(index);
        p.text = replace_spans(p.text, std::move(edits));
    }
    for (const auto& e : provenance) {
        if (e.kind == EditKind::adapt) {
            out.at(e.paragraph_index).text = e.text;
            out.at(e.paragraph_index).author = {AuthorKind::coordinator_edit, {}};
        } else if (e.kind == EditKind::extend) {
            out.push_back({static_cast<int>(out.size()), e.language.value_or(Language::zh), e.text,
                           {AuthorKind::child_extension, e.child_id}});
        }
    }
    return out;
}

std::string storybook_plain_text(const Storybook& book) {
    std::string out;
    for (const auto& p : book.paragraphs) {
        out += "[" + std::string(to_string(p.language)) + "] " + p.text + "\n\n";
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 3> kAuthorNames = {"generated", "coordinator_edit", "child_extension"};
constexpr std::array<std::string_view, 3> kEditNames = {"fill", "adapt", "extend"};

template <typename E, std::size_t N>
E enum_from(const std::array<std::string_view, N>& names, const std::string& s, const char* what) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == s) return static_cast<E>(i);
    }
    throw Error(ErrorCode::BadArguments, std::string("unknown ") + what + " '" + s + "'");
}

}  // namespace

void to_json(Json& j, Stage s) {
    j = std::string(to_string(s));
}
void from_json(const Json& j, Stage& s) {
    s = stage_from_string(j.get<std::string>());
}

void to_json(Json& j, const Author& a) {
    j = Json{{"kind", kAuthorNames[static_cast<std::size_t>(a.kind)]}};
    if (!a.child_id.empty()) j["child_id"] = a.child_id;
}
void from_json(const Json& j, Author& a) {
    a.kind = enum_from<AuthorKind>(kAuthorNames, required_field<std::string>(j, "kind"), "author kind");
    a.child_id = optional_field<std::string>(j, "child_id", "");
}

void to_json(Json& j, const Paragraph& p) {
    j = Json{{"index", p.index}, {"language", p.language}, {"text", p.text}, {"author", p.author}};
}
void from_json(const Json& j, Paragraph& p) {
    p.index = required_field<int>(j, "index");
    p.language = required_field<Language>(j, "language");
    p.text = required_field<std::string>(j, "text");
    p.author = optional_field<Author>(j, "author", {});
}

void to_json(Json& j, const StageRange& r) {
    j = Json{{"stage", r.stage}, {"first", r.first}, {"last", r.last}};
}
void from_json(const Json& j, StageRange& r) {
    r.stage = required_field<Stage>(j, "stage");
    r.first = required_field<int>(j, "first");
    r.last = required_field<int>(j, "last");
}

void to_json(Json& j, const StoryFramework& f) {
    j = Json{{"framework_id", f.framework_id},
             {"revision", f.revision},
             {"paragraphs", f.paragraphs},
             {"status", f.status == FrameworkStatus::draft ? "draft" : "confirmed"},
             {"narrative_stages", f.narrative_stages}};
}
void from_json(const Json& j, StoryFramework& f) {
    f.framework_id = required_field<std::string>(j, "framework_id");
    f.revision = optional_field<int>(j, "revision", 1);
    f.paragraphs = required_field<std::vector<Paragraph>>(j, "paragraphs");
    f.status = required_field<std::string>(j, "status") == "confirmed" ? FrameworkStatus::confirmed
                                                                       : FrameworkStatus::draft;
    f.narrative_stages = optional_field<std::vector<StageRange>>(j, "narrative_stages", {});
}

void to_json(Json& j, const ValidationIssue& i) {
    j = Json{{"code", i.code}, {"message", i.message}};
    if (i.paragraph) j["paragraph"] = *i.paragraph;
    if (!i.word.empty()) j["word"] = i.word;
}
void from_json(const Json& j, ValidationIssue& i) {
    i.code = required_field<std::string>(j, "code");
    i.message = optional_field<std::string>(j, "message", "");
    i.paragraph = optional_field<std::optional<int>>(j, "paragraph", std::nullopt);
    i.word = optional_field<std::string>(j, "word", "");
}

void to_json(Json& j, const ValidationReport& r) {
    j = Json{{"ok", r.ok()}, {"issues", r.issues}};
}
void from_json(const Json& j, ValidationReport& r) {
    r.issues = optional_field<std::vector<ValidationIssue>>(j, "issues", {});
}

void to_json(Json& j, const BlankFill& f) {
    j = Json{{"answer_text", f.answer_text}, {"filled_by", f.filled_by}, {"approved", f.approved}};
}
void from_json(const Json& j, BlankFill& f) {
    f.answer_text = required_field<std::string>(j, "answer_text");
    f.filled_by = optional_field<std::string>(j, "filled_by", "");
    f.approved = optional_field<bool>(j, "approved", false);
}

void to_json(Json& j, const Blank& b) {
    j = Json{{"blank_index", b.blank_index},      {"paragraph_index", b.paragraph_index},
             {"char_span", span_to_json(b.char_span)}, {"target_word", b.target_word},
             {"language", b.language},             {"assigned_child", b.assigned_child},
             {"fill", b.fill}};
}
void from_json(const Json& j, Blank& b) {
    b.blank_index = required_field<int>(j, "blank_index");
    b.paragraph_index = required_field<int>(j, "paragraph_index");
    b.char_span = span_from_json(j.at("char_span"));
    b.target_word = required_field<std::string>(j, "target_word");
    b.language = required_field<Language>(j, "language");
    b.assigned_child = optional_field<std::string>(j, "assigned_child", "");
    b.fill = optional_field<std::optional<BlankFill>>(j, "fill", std::nullopt);
}

void to_json(Json& j, const ClozeStory& c) {
    j = Json{{"base", c.base}, {"blanks", c.blanks}, {"status", c.status == ClozeStatus::open ? "open" : "completed"}};
}
void from_json(const Json& j, ClozeStory& c) {
    c.base = required_field<StoryFramework>(j, "base");
    c.blanks = required_field<std::vector<Blank>>(j, "blanks");
    c.status = required_field<std::string>(j, "status") == "completed" ? ClozeStatus::completed : ClozeStatus::open;
}

void to_json(Json& j, const ProvenanceEntry& e) {
    j = Json{{"kind", kEditNames[static_cast<std::size_t>(e.kind)]},
             {"paragraph_index", e.paragraph_index},
             {"text", e.text}};
    switch (e.kind) {
        case EditKind::fill:
            j["span"] = span_to_json(e.span);
            j["blank_index"] = e.blank_index;
            j["child_id"] = e.child_id;
            break;
        case EditKind::adapt:
            j["rationale"] = e.rationale;
            break;
        case EditKind::extend:
            j["child_id"] = e.child_id;
            j["utterance_id"] = e.utterance_id;
            j["language"] = e.language;
            break;
    }
}
void from_json(const Json& j, ProvenanceEntry& e) {
    e.kind = enum_from<EditKind>(kEditNames, required_field<std::string>(j, "kind"), "edit kind");
    e.paragraph_index = required_field<int>(j, "paragraph_index");
    e.text = required_field<std::string>(j, "text");
    if (j.contains("span")) e.span = span_from_json(j.at("span"));
    e.blank_index = optional_field<int>(j, "blank_index", 0);
    e.rationale = optional_field<std::string>(j, "rationale", "");
    e.child_id = optional_field<std::string>(j, "child_id", "");
    e.utterance_id = optional_field<std::string>(j, "utterance_id", "");
    e.language = optional_field<std::optional<Language>>(j, "language", std::nullopt);
}

void to_json(Json& j, const Storybook& b) {
    j = Json{{"base", b.base}, {"paragraphs", b.paragraphs}, {"provenance", b.provenance}};
}
void from_json(const Json& j, Storybook& b) {
    b.base = required_field<std::vector<Paragraph>>(j, "base");
    b.paragraphs = required_field<std::vector<Paragraph>>(j, "paragraphs");
    b.provenance = optional_field<std::vector<ProvenanceEntry>>(j, "provenance", {});
}

}  // namespace duet::story
