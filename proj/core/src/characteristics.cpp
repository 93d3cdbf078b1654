#include "duet/characteristics.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

namespace duet::characteristics {

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

std::vector<std::string> values_of(const std::vector<Tag>& tags) {
    std::vector<std::string> out;
    for (const auto& t : tags) out.push_back(t.value);
    return out;
}

std::string language_name(Language lang) {
    return lang == Language::zh ? "Chinese" : "English";
}

bool mentions(const std::string& haystack, const std::string& needle) {
    return text::ascii_lower(haystack).find(text::ascii_lower(needle)) != std::string::npos;
}

std::string strip_markup(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '*' || c == '#' || c == '`' || c == '_') continue;
        out += c;
    }
    return text::collapse_whitespace(out);
}

const Json kSummarySchema = Json::parse(R"({
  "type": "object",
  "required": ["sentences"],
  "properties": {
    "sentences": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["text"],
        "properties": {
          "text": {"type": "string", "minLength": 1},
          "source_tags": {"type": "array", "items": {"type": "string"}}
        }
      }
    }
  }
})");

const Json kMatchSchema = Json::parse(R"({
  "type": "object",
  "required": ["labels"],
  "properties": {
    "labels": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["pair", "label"],
        "properties": {"pair": {"type": "integer"}, "label": {"type": "string"}}
      }
    }
  }
})");

const Json kReasonSchema = Json::parse(R"({
  "type": "object",
  "required": ["commonalities"],
  "properties": {
    "commonalities": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["statement", "guideline_id"],
        "properties": {
          "statement": {"type": "string", "minLength": 1},
          "guideline_id": {"type": "string"},
          "evidence": {"type": "array", "items": {"type": "string"}},
          "inferred": {"type": "boolean"}
        }
      }
    },
    "differences": {"type": "array", "items": {"type": "string"}}
  }
})");

std::string metadata_line(const ChildProfile& child) {
    std::vector<std::string> parts;
    for (auto category : profile::all_categories()) {
        if (profile::kind_of(category) != profile::TagKind::Metadata) continue;
        const auto tags = child.tags_in(category);
        if (tags.empty()) continue;
        parts.push_back(std::string(profile::to_string(category)) + ": " + join(values_of(tags), ", "));
    }
    parts.push_back("native language: " + language_name(child.native_language));
    return join(parts, "; ");
}

std::string preference_line(const ChildProfile& child, profile::Polarity polarity) {
    std::vector<std::string> parts;
    for (auto category : profile::all_categories()) {
        if (profile::kind_of(category) != profile::TagKind::Preference && polarity == profile::Polarity::like) continue;
        const auto tags = child.tags_in(category, polarity);
        if (tags.empty()) continue;
        parts.push_back(std::string(profile::to_string(category)) + ": " + join(values_of(tags), ", "));
    }
    return parts.empty() ? "none" : join(parts, "; ");
}

std::string guideline_kind_name(GuidelineKind k) {
    return k == GuidelineKind::exam_level ? "exam_level" : "preference";
}

}  // namespace

// ---------------------------------------------------------------------------

bool Guideline::applies_to(const ChildProfile& child) const {
    const auto age = child.age();
    if (!age || *age < min_age || *age > max_age) return false;
    if (!genders.empty()) {
        const auto g = child.gender();
        if (!g) return false;
        const bool ok = std::any_of(genders.begin(), genders.end(), [&](const std::string& x) { return text::iequals(x, *g); });
        if (!ok) return false;
    }
    if (!proficiencies.empty() &&
        std::find(proficiencies.begin(), proficiencies.end(), child.proficiency) == proficiencies.end()) {
        return false;
    }
    if (!languages.empty()) {
        const bool covered = std::any_of(languages.begin(), languages.end(), [&](Language l) {
            return l == child.native_language || l == child.learning_language;
        });
        if (!covered) return false;
    }
    return true;
}

void to_json(Json& j, const Guideline& g) {
    j = Json{{"guideline_id", g.guideline_id},
             {"kind", guideline_kind_name(g.kind)},
             {"min_age", g.min_age},
             {"max_age", g.max_age},
             {"languages", g.languages},
             {"genders", g.genders},
             {"proficiencies", g.proficiencies},
             {"rule_text", g.rule_text},
             {"vocabulary", g.vocabulary}};
}

void from_json(const Json& j, Guideline& g) {
    constexpr auto code = ErrorCode::InvalidConfig;
    g.guideline_id = required_field<std::string>(j, "guideline_id", code);
    const auto kind = required_field<std::string>(j, "kind", code);
    if (kind == "exam_level") {
        g.kind = GuidelineKind::exam_level;
    } else if (kind == "preference") {
        g.kind = GuidelineKind::preference;
    } else {
        throw Error(code, "guideline '" + g.guideline_id + "' has unknown kind '" + kind + "'");
    }
    g.min_age = required_field<int>(j, "min_age", code);
    g.max_age = required_field<int>(j, "max_age", code);
    g.languages = optional_field<std::vector<Language>>(j, "languages", {}, code);
    g.genders = optional_field<std::vector<std::string>>(j, "genders", {}, code);
    g.proficiencies = optional_field<std::vector<profile::Cefr>>(j, "proficiencies", {}, code);
    g.rule_text = required_field<std::string>(j, "rule_text", code);
    g.vocabulary = optional_field<std::vector<std::string>>(j, "vocabulary", {}, code);
    if (g.min_age > g.max_age) throw Error(code, "guideline '" + g.guideline_id + "' has min_age > max_age");
}

GuidelineSet::GuidelineSet(std::vector<Guideline> guidelines) : guidelines_(std::move(guidelines)) {
    std::set<std::string> seen;
    for (const auto& g : guidelines_) {
        if (!seen.insert(g.guideline_id).second) {
            throw Error(ErrorCode::InvalidConfig, "duplicate guideline_id '" + g.guideline_id + "'");
        }
    }
}

GuidelineSet GuidelineSet::load_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "guidelines directory '" + dir + "' not found");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Guideline> out;
    for (const auto& path : files) {
        out.push_back(read_json_file(path.string(), ErrorCode::InvalidConfig).get<Guideline>());
    }
    return GuidelineSet(std::move(out));
}

const Guideline* GuidelineSet::find(std::string_view id) const {
    for (const auto& g : guidelines_) {
        if (g.guideline_id == id) return &g;
    }
    return nullptr;
}

std::vector<Guideline> GuidelineSet::applicable_to_both(const ChildProfile& a, const ChildProfile& b) const {
    std::vector<Guideline> out;
    for (const auto& g : guidelines_) {
        if (g.applies_to(a) && g.applies_to(b)) out.push_back(g);
    }
    return out;
}

std::vector<Guideline> GuidelineSet::applicable_to(const ChildProfile& child) const {
    std::vector<Guideline> out;
    for (const auto& g : guidelines_) {
        if (g.applies_to(child)) out.push_back(g);
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string IndividualSummary::text() const {
    std::vector<std::string> parts;
    for (const auto& s : sentences) parts.push_back(s.text);
    return join(parts, " ");
}

IndividualSummary summarize_individual(const ChildProfile& child, gateway::Gateway& gw,
                                       const gateway::TemplateLibrary& templates) {
    const std::string proficiency = "learning " + language_name(child.learning_language) + " at CEFR level " +
                                    std::string(profile::to_string(child.proficiency));
    const auto prompt = templates.render("individual_summary",
                                         {{"child_name", child.display_name},
                                          {"metadata", metadata_line(child)},
                                          {"preferences", preference_line(child, profile::Polarity::like)},
                                          {"dislikes", preference_line(child, profile::Polarity::dislike)},
                                          {"proficiency", proficiency}});
    Json reply;
    try {
        reply = gw.complete(prompt, kSummarySchema).value;
    } catch (const Error& e) {
        if (!gateway::is_generation_failure(e)) throw;
        throw gateway::generation_unavailable(e);
    }

    const std::string cefr(profile::to_string(child.proficiency));
    IndividualSummary out{child.child_id, {}, 1};
    for (const auto& item : reply.at("sentences")) {
        SummarySentence sentence{strip_markup(item.at("text").get<std::string>()), {}};
        if (sentence.text.empty()) continue;
        std::set<std::string> sources;
        for (const auto& claimed : optional_field<std::vector<std::string>>(item, "source_tags", {})) {
            if (claimed == kProficiencySource) {
                sources.insert(kProficiencySource);
                continue;
            }
            for (const auto& t : child.tags) {
                if (text::iequals(t.value, claimed)) sources.insert(t.value);
            }
        }
        for (const auto& t : child.tags) {
            if (mentions(sentence.text, t.value)) sources.insert(t.value);
        }
        if (sentence.text.find(cefr) != std::string::npos) sources.insert(kProficiencySource);
        if (sources.empty()) continue;
        sentence.source_tags.assign(sources.begin(), sources.end());
        out.sentences.push_back(std::move(sentence));
    }

    std::vector<std::string> missing;
    for (const auto& t : child.preferences()) {
        const bool covered = std::any_of(out.sentences.begin(), out.sentences.end(),
                                         [&](const SummarySentence& s) { return mentions(s.text, t.value); });
        if (!covered) missing.push_back(t.value);
    }
    if (!missing.empty()) {
        out.sentences.push_back({child.display_name + " also enjoys " + join(missing, ", ") + ".", missing});
    }
    const bool states_level = std::any_of(out.sentences.begin(), out.sentences.end(),
                                          [&](const SummarySentence& s) { return s.text.find(cefr) != std::string::npos; });
    if (!states_level) {
        out.sentences.push_back({child.display_name + " is " + proficiency + ".", {kProficiencySource}});
    }
    return out;
}

std::string describe_child(const ChildProfile& child, const IndividualSummary* summary) {
    std::string out = child.display_name + " (" + metadata_line(child) + "; learning " +
                      language_name(child.learning_language) + " at CEFR " +
                      std::string(profile::to_string(child.proficiency)) + ")";
    if (summary && !summary->sentences.empty()) return out + ": " + summary->text();
    return out + ". Preferences: " + preference_line(child, profile::Polarity::like) +
           ". Dislikes: " + preference_line(child, profile::Polarity::dislike) + ".";
}

std::string cultural_background(const ChildProfile& child) {
    const auto nationality = child.nationality();
    std::string out = nationality ? "grew up in " + *nationality : "nationality not given";
    return out + ", native language " + language_name(child.native_language);
}

IndividualSummary edit_summary(IndividualSummary summary, std::size_t index, const std::string& new_text) {
    if (index >= summary.sentences.size()) {
        throw Error(ErrorCode::OutOfRange, "summary has no sentence " + std::to_string(index));
    }
    const std::string cleaned = text::collapse_whitespace(new_text);
    if (cleaned.empty()) throw Error(ErrorCode::EmptyInput, "summary sentence is blank");
    summary.sentences[index].text = cleaned;
    ++summary.version;
    return summary;
}

// ---------------------------------------------------------------------------

namespace {

struct TagKey {
    TagCategory category;
    std::string folded;

    auto operator<=>(const TagKey&) const = default;
};

TagKey key_of(const Tag& t) {
    return {t.category, text::ascii_lower(t.value)};
}

std::vector<Tag> likes(const ChildProfile& p) {
    std::vector<Tag> out;
    for (const auto& t : p.tags) {
        if (t.polarity == profile::Polarity::like) out.push_back(t);
    }
    return out;
}

bool is_no_match(const std::string& label) {
    const std::string l = text::ascii_lower(text::trim(label));
    return l.empty() || l == "no-match" || l == "no match" || l == "none";
}

}  // namespace

std::vector<ExactMatch> exact_matches(const ChildProfile& a, const ChildProfile& b) {
    std::set<TagKey> b_keys;
    for (const auto& t : likes(b)) b_keys.insert(key_of(t));
    std::vector<std::pair<TagKey, ExactMatch>> found;
    std::set<TagKey> seen;
    for (const auto& t : likes(a)) {
        const TagKey k = key_of(t);
        if (b_keys.count(k) && seen.insert(k).second) found.push_back({k, ExactMatch{t.category, t.value}});
    }
    std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<ExactMatch> out;
    for (auto& [k, m] : found) out.push_back(std::move(m));
    return out;
}

MatchSet match_tags(const ChildProfile& a, const ChildProfile& b, gateway::Gateway& gw,
                    const gateway::TemplateLibrary& templates) {
    MatchSet out;
    const bool swapped = b.child_id < a.child_id;
    const ChildProfile& first = swapped ? b : a;
    const ChildProfile& second = swapped ? a : b;
    out.exact = exact_matches(first, second);

    std::set<TagKey> matched;
    for (const auto& m : out.exact) matched.insert(TagKey{m.category, text::ascii_lower(m.value)});
    auto unmatched_prefs = [&](const ChildProfile& p) {
        std::vector<Tag> v;
        for (const auto& t : p.preferences()) {
            if (!matched.count(key_of(t))) v.push_back(t);
        }
        return v;
    };
    const auto left = unmatched_prefs(first);
    const auto right = unmatched_prefs(second);
    if (left.empty() || right.empty()) return out;

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::ostringstream listing;
    for (std::size_t i = 0; i < left.size(); ++i) {
        for (std::size_t k = 0; k < right.size(); ++k) {
            pairs.emplace_back(i, k);
            listing << pairs.size() << ". \"" << left[i].value << "\" (" << profile::to_string(left[i].category)
                    << ") vs \"" << right[k].value << "\" (" << profile::to_string(right[k].category) << ")\n";
        }
    }
    const auto prompt = templates.render("tag_matching", {{"pairs", listing.str()}});

    Json reply;
    try {
        reply = gw.complete(prompt, kMatchSchema).value;
    } catch (const Error& e) {
        if (!gateway::is_generation_failure(e)) throw;
        out.degraded = true;
        return out;
    }

    std::set<std::size_t> used;
    std::vector<ApproximateMatch> approx;
    for (const auto& item : reply.at("labels")) {
        const auto number = item.at("pair").get<long long>();
        const auto label = text::collapse_whitespace(item.at("label").get<std::string>());
        if (number < 1 || static_cast<std::size_t>(number) > pairs.size() || is_no_match(label)) continue;
        if (!used.insert(static_cast<std::size_t>(number)).second) continue;
        const auto& [i, k] = pairs[static_cast<std::size_t>(number) - 1];
        ApproximateMatch m{label, {left[i], right[k]}};
        approx.push_back(std::move(m));
    }
    std::sort(approx.begin(), approx.end(), [](const ApproximateMatch& x, const ApproximateMatch& y) {
        return std::tie(x.unified_category_label, x.tags[0].value, x.tags[1].value) <
               std::tie(y.unified_category_label, y.tags[0].value, y.tags[1].value);
    });
    if (swapped) {
        for (auto& m : approx) std::swap(m.tags[0], m.tags[1]);
    }
    out.approximate = std::move(approx);
    return out;
}

ReasoningResult reason_commonalities(const ChildProfile& a, const ChildProfile& b, const GuidelineSet& guidelines,
                                     gateway::Gateway& gw, const gateway::TemplateLibrary& templates) {
    ReasoningResult out;
    const auto applicable = guidelines.applicable_to_both(a, b);
    if (applicable.empty()) {
        out.no_applicable_guideline = true;
        return out;
    }

    const bool swapped = b.child_id < a.child_id;
    const ChildProfile& first = swapped ? b : a;
    const ChildProfile& second = swapped ? a : b;
    std::ostringstream children;
    for (const ChildProfile* c : {&first, &second}) {
        children << "- " << c->display_name << ": " << metadata_line(*c) << "; learning "
                 << language_name(c->learning_language) << " at " << profile::to_string(c->proficiency)
                 << "; preferences: " << preference_line(*c, profile::Polarity::like) << "\n";
    }
    std::ostringstream rules;
    for (const auto& g : applicable) {
        rules << "- [" << g.guideline_id << "] (" << guideline_kind_name(g.kind) << ", ages " << g.min_age << "-"
              << g.max_age << ") " << g.rule_text << "\n";
    }
    const auto prompt =
        templates.render("common_reasoning", {{"children", children.str()}, {"guidelines", rules.str()}});

    Json reply;
    try {
        reply = gw.complete(prompt, kReasonSchema).value;
    } catch (const Error& e) {
        if (!gateway::is_generation_failure(e)) throw;
        throw gateway::generation_unavailable(e);
    }

    for (const auto& item : reply.at("commonalities")) {
        const auto id = item.at("guideline_id").get<std::string>();
        const auto it = std::find_if(applicable.begin(), applicable.end(),
                                     [&](const Guideline& g) { return g.guideline_id == id; });
        if (it == applicable.end()) continue;
        ReasonedCommonality r;
        r.statement = text::collapse_whitespace(item.at("statement").get<std::string>());
        r.guideline_id = id;
        r.evidence = optional_field<std::vector<std::string>>(item, "evidence", {});
        r.inferred = it->kind == GuidelineKind::preference && optional_field<bool>(item, "inferred", false);
        if (!r.statement.empty()) out.commonalities.push_back(std::move(r));
    }
    out.differences = optional_field<std::vector<std::string>>(reply, "differences", {});
    return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string exact_sentence(const ExactMatch& m) {
    switch (m.category) {
        case TagCategory::Age: return "Both children are " + m.value + " years old.";
        case TagCategory::Gender: return "Both children are " + m.value + ".";
        case TagCategory::Nationality: return "Both children come from " + m.value + ".";
        case TagCategory::LanguageProficiency: return "Both children have " + m.value + " language proficiency.";
        case TagCategory::Personality: return "Both children are " + m.value + ".";
        case TagCategory::PreferredTopic: return "Both children enjoy " + m.value + " stories.";
        case TagCategory::PreferredContent: return "Both children like " + m.value + ".";
        case TagCategory::InteractionStyle: return "Both children prefer " + m.value + " interaction.";
    }
    return "Both children share " + m.value + ".";
}

}  // namespace

CommonSummary compose_common_summary(const MatchSet& match_set, const ReasoningResult& reasoned) {
    CommonSummary out;
    out.match_set = match_set;
    out.reasoned = reasoned.commonalities;
    out.differences = reasoned.differences;
    out.no_applicable_guideline = reasoned.no_applicable_guideline;

    for (std::size_t i = 0; i < match_set.exact.size(); ++i) {
        out.trace.push_back({TraceSource::exact, i, out.sentences.size()});
        out.sentences.push_back(exact_sentence(match_set.exact[i]));
    }
    for (std::size_t i = 0; i < match_set.approximate.size(); ++i) {
        const auto& m = match_set.approximate[i];
        out.trace.push_back({TraceSource::approximate, i, out.sentences.size()});
        out.sentences.push_back("Both children are drawn to " + m.unified_category_label + " (" + m.tags[0].value +
                                " / " + m.tags[1].value + ").");
    }
    for (std::size_t i = 0; i < reasoned.commonalities.size(); ++i) {
        out.trace.push_back({TraceSource::reasoned, i, out.sentences.size()});
        out.sentences.push_back(reasoned.commonalities[i].statement);
    }
    return out;
}

bool trace_is_total(const CommonSummary& s) {
    auto covered = [&](TraceSource src, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            const bool hit = std::any_of(s.trace.begin(), s.trace.end(), [&](const TraceEntry& t) {
                return t.source == src && t.entry == i && t.sentence < s.sentences.size();
            });
            if (!hit) return false;
        }
        return true;
    };
    return covered(TraceSource::exact, s.match_set.exact.size()) &&
           covered(TraceSource::approximate, s.match_set.approximate.size()) &&
           covered(TraceSource::reasoned, s.reasoned.size());
}

// ---------------------------------------------------------------------------

void to_json(Json& j, const SummarySentence& s) {
    j = Json{{"text", s.text}, {"source_tags", s.source_tags}};
}
void from_json(const Json& j, SummarySentence& s) {
    s.text = required_field<std::string>(j, "text");
    s.source_tags = optional_field<std::vector<std::string>>(j, "source_tags", {});
}

void to_json(Json& j, const IndividualSummary& s) {
    j = Json{{"child_id", s.child_id}, {"sentences", s.sentences}, {"version", s.version}};
}
void from_json(const Json& j, IndividualSummary& s) {
    s.child_id = required_field<std::string>(j, "child_id");
    s.sentences = required_field<std::vector<SummarySentence>>(j, "sentences");
    s.version = optional_field<int>(j, "version", 1);
}

void to_json(Json& j, const ExactMatch& m) {
    j = Json{{"category", m.category}, {"value", m.value}};
}
void from_json(const Json& j, ExactMatch& m) {
    m.category = required_field<TagCategory>(j, "category");
    m.value = required_field<std::string>(j, "value");
}

void to_json(Json& j, const ApproximateMatch& m) {
    j = Json{{"unified_category_label", m.unified_category_label}, {"tags", Json::array({m.tags[0], m.tags[1]})}};
}
void from_json(const Json& j, ApproximateMatch& m) {
    m.unified_category_label = required_field<std::string>(j, "unified_category_label");
    const auto tags = required_field<std::vector<Tag>>(j, "tags");
    if (tags.size() != 2) throw Error(ErrorCode::BadArguments, "approximate match needs two tags");
    m.tags = {tags[0], tags[1]};
}

void to_json(Json& j, const MatchSet& m) {
    j = Json{{"exact", m.exact}, {"approximate", m.approximate}, {"degraded", m.degraded}};
}
void from_json(const Json& j, MatchSet& m) {
    m.exact = optional_field<std::vector<ExactMatch>>(j, "exact", {});
    m.approximate = optional_field<std::vector<ApproximateMatch>>(j, "approximate", {});
    m.degraded = optional_field<bool>(j, "degraded", false);
}

void to_json(Json& j, const ReasonedCommonality& r) {
    j = Json{{"statement", r.statement}, {"guideline_id", r.guideline_id}, {"evidence", r.evidence}, {"inferred", r.inferred}};
}
void from_json(const Json& j, ReasonedCommonality& r) {
    r.statement = required_field<std::string>(j, "statement");
    r.guideline_id = required_field<std::string>(j, "guideline_id");
    r.evidence = optional_field<std::vector<std::string>>(j, "evidence", {});
    r.inferred = optional_field<bool>(j, "inferred", false);
}

namespace {
std::string source_name(TraceSource s) {
    switch (s) {
        case TraceSource::exact: return "exact";
        case TraceSource::approximate: return "approximate";
        case TraceSource::reasoned: return "reasoned";
    }
    return "?";
}
}  // namespace

void to_json(Json& j, const TraceEntry& t) {
    j = Json{{"source", source_name(t.source)}, {"entry", t.entry}, {"sentence", t.sentence}};
}
void from_json(const Json& j, TraceEntry& t) {
    const auto s = required_field<std::string>(j, "source");
    if (s == "exact") {
        t.source = TraceSource::exact;
    } else if (s == "approximate") {
        t.source = TraceSource::approximate;
    } else if (s == "reasoned") {
        t.source = TraceSource::reasoned;
    } else {
        throw Error(ErrorCode::BadArguments, "unknown trace source '" + s + "'");
    }
    t.entry = required_field<std::size_t>(j, "entry");
    t.sentence = required_field<std::size_t>(j, "sentence");
}

void to_json(Json& j, const CommonSummary& s) {
    j = Json{{"sentences", s.sentences},
             {"match_set", s.match_set},
             {"reasoned", s.reasoned},
             {"trace", s.trace},
             {"differences", s.differences},
             {"no_applicable_guideline", s.no_applicable_guideline}};
}
void from_json(const Json& j, CommonSummary& s) {
    s.sentences = optional_field<std::vector<std::string>>(j, "sentences", {});
    s.match_set = optional_field<MatchSet>(j, "match_set", {});
    s.reasoned = optional_field<std::vector<ReasonedCommonality>>(j, "reasoned", {});
    s.trace = optional_field<std::vector<TraceEntry>>(j, "trace", {});
    s.differences = optional_field<std::vector<std::string>>(j, "differences", {});
    s.no_applicable_guideline = optional_field<bool>(j, "no_applicable_guideline", false);
}

}  // namespace duet::characteristics
