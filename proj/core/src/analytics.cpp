#include "duet/analytics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

namespace duet::analytics {

namespace {

constexpr std::array<std::string_view, 3> kDimensionNames = {"topical_relevance", "intelligibility", "accuracy"};

// Capitalized words that open sentences without naming anything.
const std::set<std::string> kNotEntities = {
    "i",     "a",    "an",   "the",   "and",   "but",   "or",    "so",    "then",  "because", "he",   "she",
    "it",    "we",   "they", "you",   "my",    "our",   "his",   "her",   "their", "this",    "that", "there",
    "here",  "yes",  "no",   "maybe", "oh",    "wow",   "ok",    "okay",  "well",  "when",    "what", "where",
    "who",   "why",  "how",  "if",    "in",    "on",    "at",    "to",    "with",  "is",      "are",  "was",
    "were",  "do",   "does", "did",   "can",   "will",  "let",   "lets",  "let's", "hello",   "hi",   "first",
    "next",  "after", "before", "one", "two", "some", "all", "mr", "mrs", "ms",
};

bool is_ascii_letter(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

struct RawWord {
    std::string text;
    std::size_t begin;
    std::size_t end;
};

std::vector<RawWord> ascii_words(const std::string& s) {
    std::vector<RawWord> out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (!is_ascii_letter(s[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < s.size() && (is_ascii_letter(s[j]) || (s[j] >= '0' && s[j] <= '9') ||
                                (s[j] == '\'' && j + 1 < s.size() && is_ascii_letter(s[j + 1])))) {
            ++j;
        }
        out.push_back({s.substr(i, j - i), i, j});
        i = j;
    }
    return out;
}

bool capitalized(const std::string& w) {
    return !w.empty() && w[0] >= 'A' && w[0] <= 'Z';
}

/// Maximal runs of capitalized words separated by single spaces.
std::vector<std::string> capitalized_runs(const std::string& s) {
    const auto words = ascii_words(s);
    std::vector<std::string> out;
    std::vector<std::string> run;
    std::size_t run_end = 0;
    auto flush = [&] {
        if (run.empty()) return;
        while (!run.empty() && kNotEntities.count(text::ascii_lower(run.front()))) run.erase(run.begin());
        if (!run.empty()) {
            std::string joined;
            for (const auto& w : run) joined += (joined.empty() ? "" : " ") + w;
            out.push_back(joined);
        }
        run.clear();
    };
    for (const auto& w : words) {
        const bool adjacent = !run.empty() && w.begin == run_end + 1 && s[run_end] == ' ';
        if (capitalized(w.text)) {
            if (!adjacent) flush();
            run.push_back(w.text);
            run_end = w.end;
        } else {
            flush();
        }
    }
    flush();
    return out;
}

int count_mentions(const std::string& haystack, const std::string& entity) {
    return static_cast<int>(text::find_all_words(text::ascii_lower(haystack), text::ascii_lower(entity), Language::en).size());
}

std::string format_decimal(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

const std::vector<std::string>& default_fillers() {
    static const std::vector<std::string> fillers = {"uh", "um", "aha", "er", "hmm", "嗯", "呃", "啊"};
    return fillers;
}

std::vector<std::string> tokenize_response(const std::string& transcript, const std::vector<std::string>& fillers) {
    std::set<std::string> skip;
    for (const auto& f : fillers) skip.insert(text::ascii_lower(f));
    std::vector<std::string> out;
    for (auto& t : text::word_tokens(transcript)) {
        if (!skip.count(t)) out.push_back(std::move(t));
    }
    return out;
}

std::string_view to_string(CodeDimension d) {
    return kDimensionNames[static_cast<std::size_t>(d)];
}

CodeDimension code_dimension_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kDimensionNames.size(); ++i) {
        if (kDimensionNames[i] == name) return static_cast<CodeDimension>(i);
    }
    throw Error(ErrorCode::BadArguments, "unknown code dimension '" + std::string(name) + "'");
}

int max_code(CodeDimension d) {
    return d == CodeDimension::accuracy ? 1 : 2;
}

std::optional<int> Codes::get(CodeDimension d) const {
    switch (d) {
        case CodeDimension::topical_relevance: return topical_relevance;
        case CodeDimension::intelligibility: return intelligibility;
        case CodeDimension::accuracy: return accuracy;
    }
    return std::nullopt;
}

void Codes::set(CodeDimension d, int value) {
    switch (d) {
        case CodeDimension::topical_relevance: topical_relevance = value; break;
        case CodeDimension::intelligibility: intelligibility = value; break;
        case CodeDimension::accuracy: accuracy = value; break;
    }
}

std::optional<int> ResponseRecord::effective(CodeDimension d) const {
    if (auto v = manual_codes.get(d)) return v;
    return auto_codes.get(d);
}

ResponseRecord make_record(std::string record_id, const questions::GeneratedQuestion& question,
                           const std::string& transcript, const Codes& manual) {
    ResponseRecord r;
    r.record_id = std::move(record_id);
    r.question_id = question.question_id;
    r.child_id = question.spec.target_child;
    r.attribute = question.spec.attribute;
    r.question_text = question.text;
    r.transcript = transcript;
    r.tokens = tokenize_response(transcript);
    for (auto d : {CodeDimension::topical_relevance, CodeDimension::intelligibility, CodeDimension::accuracy}) {
        if (auto v = manual.get(d)) r = code_response(std::move(r), d, *v, CodeSource::coordinator);
    }
    return r;
}

ResponseRecord code_response(ResponseRecord record, CodeDimension dimension, int value, CodeSource by) {
    if (value < 0 || value > max_code(dimension)) {
        throw Error(ErrorCode::OutOfRange, std::string(to_string(dimension)) + " must be within 0.." +
                                               std::to_string(max_code(dimension)));
    }
    if (by == CodeSource::gateway_suggestion) {
        if (dimension == CodeDimension::intelligibility) {
            throw Error(ErrorCode::GatewayCannotCode, "intelligibility");
        }
        record.auto_codes.set(dimension, value);
    } else {
        record.manual_codes.set(dimension, value);
    }
    return record;
}

Codes suggest_codes(const ResponseRecord& record, const std::string& expected_answer, gateway::Gateway& gw,
                    const gateway::TemplateLibrary& templates) {
    static const Json schema = Json::parse(R"({
      "type": "object",
      "required": ["topical_relevance", "accuracy"],
      "properties": {
        "topical_relevance": {"type": "integer", "enum": [0, 1, 2]},
        "accuracy": {"type": "integer", "enum": [0, 1]}
      }
    })");
    const auto prompt = templates.render(
        "code_suggestion",
        {{"question", record.question_text}, {"expected", expected_answer}, {"transcript", record.transcript}});
    Json reply;
    try {
        reply = gw.complete(prompt, schema).value;
    } catch (const Error& e) {
        if (!gateway::is_generation_failure(e)) throw;
        throw gateway::generation_unavailable(e);
    }
    Codes c;
    c.topical_relevance = reply.at("topical_relevance").get<int>();
    c.accuracy = reply.at("accuracy").get<int>();
    return c;
}

// ---------------------------------------------------------------------------

std::string Ratio::fraction() const {
    if (!count) return "n/a";
    const long long g = std::gcd(sum, count);
    const long long n = g ? sum / g : sum;
    const long long d = g ? count / g : count;
    return d == 1 ? std::to_string(n) : std::to_string(n) + "/" + std::to_string(d);
}

EngagementMetrics compute_engagement(const std::vector<ResponseRecord>& records, const std::string& child_id) {
    EngagementMetrics m;
    m.child_id = child_id;
    for (auto a : questions::all_attributes()) m.per_attribute_counts[a] = 0;
    for (auto d : kDimensionNames) m.suggested_counts[std::string(d)] = 0;
    std::set<std::string> distinct;
    for (const auto& r : records) {
        if (r.child_id != child_id) continue;
        ++m.questions_answered;
        m.productivity += static_cast<int>(r.tokens.size());
        distinct.insert(r.tokens.begin(), r.tokens.end());
        ++m.per_attribute_counts[r.attribute];
        const std::pair<CodeDimension, Ratio*> dims[] = {{CodeDimension::topical_relevance, &m.topical_relevance_mean},
                                                         {CodeDimension::intelligibility, &m.intelligibility_mean},
                                                         {CodeDimension::accuracy, &m.accuracy_mean}};
        for (auto [d, ratio] : dims) {
            const auto v = r.effective(d);
            if (!v) continue;
            ratio->sum += *v;
            ++ratio->count;
            if (!r.manual_codes.get(d)) ++m.suggested_counts[std::string(to_string(d))];
        }
    }
    m.lexical_diversity = static_cast<int>(distinct.size());
    return m;
}

std::vector<FeatureFeedback> derive_feature_feedback(const std::vector<ResponseRecord>& records,
                                                     const profile::ChildProfile& child, int threshold) {
    std::vector<const ResponseRecord*> mine;
    for (const auto& r : records) {
        if (r.child_id == child.child_id) mine.push_back(&r);
    }
    std::sort(mine.begin(), mine.end(),
              [](const ResponseRecord* a, const ResponseRecord* b) {
                  // Shorter ids first so "r6" sorts before "r14".
                  return std::pair(a->record_id.size(), a->record_id) < std::pair(b->record_id.size(), b->record_id);
              });

    // Candidate display form: first capitalized spelling seen, keyed case-insensitively.
    std::map<std::string, std::string> candidates;
    for (const auto* r : mine) {
        for (const auto& run : capitalized_runs(r->transcript)) candidates.emplace(text::ascii_lower(run), run);
    }

    std::vector<FeatureFeedback> out;
    for (const auto& [key, display] : candidates) {
        const bool known = std::any_of(child.tags.begin(), child.tags.end(), [&](const profile::Tag& t) {
            return text::iequals(t.value, display);
        });
        if (known) continue;
        FeatureFeedback f;
        f.child_id = child.child_id;
        f.entity = display;
        for (const auto* r : mine) {
            const int n = count_mentions(r->transcript, display);
            if (n == 0) continue;
            f.occurrences += n;
            f.evidence.push_back(r->record_id);
        }
        if (f.occurrences < threshold) continue;
        // Entities spanning several words are still single labels.
        f.proposal = profile::Tag{profile::TagCategory::PreferredContent, display, profile::Polarity::like,
                                  profile::TagOrigin::feedback};
        out.push_back(std::move(f));
    }
    // A shorter name nested in a longer proposal ("Princess" in "Disney Princess") adds nothing.
    std::vector<FeatureFeedback> kept;
    for (const auto& f : out) {
        const bool nested = std::any_of(out.begin(), out.end(), [&](const FeatureFeedback& g) {
            return g.entity.size() > f.entity.size() && count_mentions(g.entity, f.entity) > 0 &&
                   g.occurrences >= f.occurrences;
        });
        if (!nested) kept.push_back(f);
    }
    return kept;
}

std::vector<profile::Tag> propose_profile_updates(const std::vector<FeatureFeedback>& feedback) {
    std::vector<profile::Tag> out;
    for (const auto& f : feedback) {
        const bool dup = std::any_of(out.begin(), out.end(),
                                     [&](const profile::Tag& t) { return profile::same_tag(t, f.proposal); });
        if (!dup) out.push_back(f.proposal);
    }
    return out;
}

EngagementReport build_report(const std::vector<ResponseRecord>& records, const profile::SessionConfig& config) {
    EngagementReport report;
    for (const auto& c : config.children) {
        report.metrics.push_back(compute_engagement(records, c.child_id));
        report.display_names[c.child_id] = c.display_name;
        for (auto& f : derive_feature_feedback(records, c)) report.feedback.push_back(std::move(f));
    }
    report.answered = records;
    return report;
}

std::string report_text(const EngagementReport& report) {
    std::ostringstream out;
    auto name_of = [&](const std::string& id) {
        auto it = report.display_names.find(id);
        return it == report.display_names.end() ? id : it->second;
    };
    auto row = [&](const std::string& label, const std::vector<std::string>& cells) {
        std::string line = label;
        line.resize(std::max<std::size_t>(line.size(), 28), ' ');
        for (const auto& c : cells) {
            std::string cell = c;
            cell.resize(std::max<std::size_t>(cell.size(), 18), ' ');
            line += cell;
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << "\n";
    };
    auto ratio_cell = [](const Ratio& r) {
        return r.defined() ? r.fraction() + " (" + format_decimal(r.value()) + ")" : std::string("n/a");
    };

    out << "ENGAGEMENT REVIEW (read-only)\n\n";
    std::vector<std::string> header;
    for (const auto& m : report.metrics) header.push_back(name_of(m.child_id));
    row("Metric", header);
    auto metric_row = [&](const std::string& label, auto get) {
        std::vector<std::string> cells;
        for (const auto& m : report.metrics) cells.push_back(get(m));
        row(label, cells);
    };
    metric_row("Questions answered", [](const EngagementMetrics& m) { return std::to_string(m.questions_answered); });
    metric_row("Productivity (words)", [](const EngagementMetrics& m) { return std::to_string(m.productivity); });
    metric_row("Lexical diversity", [](const EngagementMetrics& m) { return std::to_string(m.lexical_diversity); });
    metric_row("Topical relevance (0-2)", [&](const EngagementMetrics& m) { return ratio_cell(m.topical_relevance_mean); });
    metric_row("Intelligibility (0-2)", [&](const EngagementMetrics& m) { return ratio_cell(m.intelligibility_mean); });
    metric_row("Accuracy (0-1)", [&](const EngagementMetrics& m) { return ratio_cell(m.accuracy_mean); });
    metric_row("Suggested codes used", [](const EngagementMetrics& m) {
        int n = 0;
        for (const auto& [k, v] : m.suggested_counts) n += v;
        return std::to_string(n);
    });

    out << "\nAnswers per question attribute\n";
    row("Attribute", header);
    for (auto a : questions::all_attributes()) {
        std::vector<std::string> cells;
        for (const auto& m : report.metrics) cells.push_back(std::to_string(m.per_attribute_counts.at(a)));
        row("  " + std::string(questions::to_string(a)), cells);
    }

    out << "\nAnswered questions\n";
    for (const auto& r : report.answered) {
        out << "- " << r.record_id << " [" << name_of(r.child_id) << ", " << questions::to_string(r.attribute)
            << "] " << r.question_text << "\n    answer: " << r.transcript << "\n";
    }

    out << "\nFeature feedback\n";
    if (report.feedback.empty()) out << "- none\n";
    for (const auto& f : report.feedback) {
        out << "- " << name_of(f.child_id) << " mentioned \"" << f.entity << "\" " << f.occurrences
            << " times (";
        for (std::size_t i = 0; i < f.evidence.size(); ++i) out << (i ? ", " : "") << f.evidence[i];
        out << "); proposed tag " << profile::to_string(f.proposal.category) << ": " << f.proposal.value << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------

void to_json(Json& j, const Codes& c) {
    j = Json{{"topical_relevance", c.topical_relevance},
             {"intelligibility", c.intelligibility},
             {"accuracy", c.accuracy}};
}
void from_json(const Json& j, Codes& c) {
    c.topical_relevance = optional_field<std::optional<int>>(j, "topical_relevance", std::nullopt);
    c.intelligibility = optional_field<std::optional<int>>(j, "intelligibility", std::nullopt);
    c.accuracy = optional_field<std::optional<int>>(j, "accuracy", std::nullopt);
}

void to_json(Json& j, const ResponseRecord& r) {
    Json suggested = r.auto_codes;
    suggested["suggested"] = true;
    j = Json{{"record_id", r.record_id},         {"question_id", r.question_id},
             {"child_id", r.child_id},           {"attribute", r.attribute},
             {"question_text", r.question_text}, {"transcript", r.transcript},
             {"tokens", r.tokens},               {"manual_codes", r.manual_codes},
             {"auto_codes", suggested}};
}
void from_json(const Json& j, ResponseRecord& r) {
    r.record_id = required_field<std::string>(j, "record_id");
    r.question_id = required_field<std::string>(j, "question_id");
    r.child_id = required_field<std::string>(j, "child_id");
    r.attribute = required_field<questions::Attribute>(j, "attribute");
    r.question_text = optional_field<std::string>(j, "question_text", "");
    r.transcript = required_field<std::string>(j, "transcript");
    r.tokens = optional_field<std::vector<std::string>>(j, "tokens", {});
    r.manual_codes = optional_field<Codes>(j, "manual_codes", {});
    r.auto_codes = optional_field<Codes>(j, "auto_codes", {});
}

void to_json(Json& j, const Ratio& r) {
    j = Json{{"sum", r.sum}, {"count", r.count}, {"fraction", r.fraction()}};
    j["value"] = r.defined() ? Json(r.value()) : Json(nullptr);
}
void from_json(const Json& j, Ratio& r) {
    r.sum = required_field<long long>(j, "sum");
    r.count = required_field<long long>(j, "count");
}

void to_json(Json& j, const EngagementMetrics& m) {
    Json per_attr = Json::object();
    for (const auto& [a, n] : m.per_attribute_counts) per_attr[std::string(questions::to_string(a))] = n;
    j = Json{{"child_id", m.child_id},
             {"questions_answered", m.questions_answered},
             {"productivity", m.productivity},
             {"lexical_diversity", m.lexical_diversity},
             {"topical_relevance_mean", m.topical_relevance_mean},
             {"intelligibility_mean", m.intelligibility_mean},
             {"accuracy_mean", m.accuracy_mean},
             {"per_attribute_counts", per_attr},
             {"suggested_counts", m.suggested_counts}};
}
void from_json(const Json& j, EngagementMetrics& m) {
    m.child_id = required_field<std::string>(j, "child_id");
    m.questions_answered = required_field<int>(j, "questions_answered");
    m.productivity = required_field<int>(j, "productivity");
    m.lexical_diversity = required_field<int>(j, "lexical_diversity");
    m.topical_relevance_mean = required_field<Ratio>(j, "topical_relevance_mean");
    m.intelligibility_mean = required_field<Ratio>(j, "intelligibility_mean");
    m.accuracy_mean = required_field<Ratio>(j, "accuracy_mean");
    m.per_attribute_counts.clear();
    const auto per_attr = required_field<Json>(j, "per_attribute_counts");
    for (const auto& [k, v] : per_attr.items()) {
        m.per_attribute_counts[questions::attribute_from_string(k)] = v.get<int>();
    }
    m.suggested_counts = optional_field<std::map<std::string, int>>(j, "suggested_counts", {});
}

void to_json(Json& j, const FeatureFeedback& f) {
    j = Json{{"child_id", f.child_id},
             {"entity", f.entity},
             {"occurrences", f.occurrences},
             {"proposal", f.proposal},
             {"evidence", f.evidence}};
}
void from_json(const Json& j, FeatureFeedback& f) {
    f.child_id = required_field<std::string>(j, "child_id");
    f.entity = required_field<std::string>(j, "entity");
    f.occurrences = required_field<int>(j, "occurrences");
    f.proposal = required_field<profile::Tag>(j, "proposal");
    f.evidence = required_field<std::vector<std::string>>(j, "evidence");
}

void to_json(Json& j, const EngagementReport& r) {
    j = Json{{"metrics", r.metrics},
             {"answered", r.answered},
             {"feedback", r.feedback},
             {"display_names", r.display_names},
             {"read_only", r.read_only}};
}
void from_json(const Json& j, EngagementReport& r) {
    r.metrics = required_field<std::vector<EngagementMetrics>>(j, "metrics");
    r.answered = required_field<std::vector<ResponseRecord>>(j, "answered");
    r.feedback = required_field<std::vector<FeatureFeedback>>(j, "feedback");
    r.display_names = optional_field<std::map<std::string, std::string>>(j, "display_names", {});
    r.read_only = optional_field<bool>(j, "read_only", true);
}

}  // namespace duet::analytics
