#include "duet/invariants.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

namespace duet::invariants {

using session::SessionState;

namespace {

using Check = void (*)(const SessionState&, std::vector<Violation>&);

void fail(std::vector<Violation>& out, const char* name, std::string detail) {
    out.push_back({name, std::move(detail)});
}

void gap_free_log(const SessionState& s, std::vector<Violation>& out) {
    for (std::size_t i = 0; i < s.event_log.size(); ++i) {
        if (s.event_log[i].seq != i + 1) {
            fail(out, "gap_free_log", "event " + std::to_string(i) + " has seq " + std::to_string(s.event_log[i].seq));
            return;
        }
    }
}

void version_matches_log(const SessionState& s, std::vector<Violation>& out) {
    if (s.version != s.event_log.size()) {
        fail(out, "version_matches_log",
             "version " + std::to_string(s.version) + " over " + std::to_string(s.event_log.size()) + " events");
    }
}

void framework_alternation(const SessionState& s, std::vector<Violation>& out) {
    if (s.framework && s.framework->status == story::FrameworkStatus::confirmed &&
        !story::alternates(s.framework->paragraphs)) {
        fail(out, "framework_alternation", "confirmed framework repeats a language");
    }
}

void framework_coverage(const SessionState& s, std::vector<Violation>& out) {
    if (!s.framework || s.framework->status != story::FrameworkStatus::confirmed) return;
    const auto report =
        story::validate_framework(*s.framework, s.config.target_words, s.config.first_paragraph_language);
    if (!report.ok()) fail(out, "framework_coverage", report.issues.front().message);
}

void cloze_round_trip(const SessionState& s, std::vector<Violation>& out) {
    if (!s.cloze) return;
    story::ClozeStory trial = *s.cloze;
    for (auto& b : trial.blanks) b.fill.reset();
    for (const auto& b : s.cloze->blanks) {
        trial = story::fill_blank(std::move(trial), b.blank_index, b.target_word, b.assigned_child, true);
    }
    if (story::reconstruct(trial) != s.cloze->base.paragraphs) {
        fail(out, "cloze_round_trip", "filling every blank with its word does not restore the framework");
    }
}

void blank_fairness(const SessionState& s, std::vector<Violation>& out) {
    if (!s.cloze) return;
    std::map<std::string, int> counts;
    for (const auto& c : s.config.children) counts[c.child_id] = 0;
    for (const auto& b : s.cloze->blanks) ++counts[b.assigned_child];
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end(),
                                              [](const auto& a, const auto& b) { return a.second < b.second; });
    if (hi->second - lo->second > 1) fail(out, "blank_fairness", hi->first + " holds too many blanks");
}

void storybook_alternation(const SessionState& s, std::vector<Violation>& out) {
    if (s.storybook && !story::alternates(s.storybook->paragraphs)) {
        fail(out, "storybook_alternation", "storybook repeats a language on consecutive paragraphs");
    }
}

void storybook_coverage(const SessionState& s, std::vector<Violation>& out) {
    if (!s.storybook) return;
    for (const auto& [lang, words] : s.config.target_words.words_by_language) {
        for (const auto& w : words) {
            const bool found = std::any_of(s.storybook->paragraphs.begin(), s.storybook->paragraphs.end(),
                                           [&](const story::Paragraph& p) {
                                               return p.language == lang && text::find_word(p.text, w, lang);
                                           });
            if (!found) {
                fail(out, "storybook_coverage", "target word '" + w + "' is missing");
                return;
            }
        }
    }
}

void provenance_replay(const SessionState& s, std::vector<Violation>& out) {
    if (!s.storybook) return;
    if (story::replay_provenance(s.storybook->base, s.storybook->provenance) != s.storybook->paragraphs) {
        fail(out, "provenance_replay", "provenance log does not rebuild the storybook");
    }
}

void question_fairness(const SessionState& s, std::vector<Violation>& out) {
    if (!s.ledger.overrides.empty() || s.config.children.size() != 2) return;
    auto count = [&](const std::string& id) {
        auto it = s.ledger.questions_selected.find(id);
        return it == s.ledger.questions_selected.end() ? 0 : it->second;
    };
    const int a = count(s.config.children[0].child_id);
    const int b = count(s.config.children[1].child_id);
    if (std::abs(a - b) > 1) {
        fail(out, "question_fairness", "selection counts " + std::to_string(a) + " and " + std::to_string(b));
    }
}

void question_language(const SessionState& s, std::vector<Violation>& out) {
    for (const auto& q : s.questions) {
        if (!s.config.has_child(q.spec.target_child) ||
            q.language != s.config.child(q.spec.target_child).learning_language) {
            fail(out, "question_language", q.question_id + " is not in its child's learning language");
            return;
        }
    }
}

void cloze_question_excludes_word(const SessionState& s, std::vector<Violation>& out) {
    if (!s.cloze) return;
    for (const auto& q : s.questions) {
        if (q.spec.stage != questions::QuestionStage::cloze || q.coordinator_authored) continue;
        const auto& word = s.cloze->blank(q.spec.anchor.index).target_word;
        if (text::contains_token(q.text, word)) {
            fail(out, "cloze_question_excludes_word", q.question_id + " names '" + word + "'");
            return;
        }
    }
}

void adaptation_matrix(const SessionState& s, std::vector<Violation>& out) {
    std::map<std::pair<int, std::string>, std::vector<questions::GeneratedQuestion>> batches;
    for (const auto& q : s.questions) {
        if (q.spec.stage != questions::QuestionStage::adaptation || q.coordinator_authored) continue;
        batches[{q.spec.anchor.index, q.spec.target_child}].push_back(q);
    }
    for (const auto& [key, qs] : batches) {
        if (!questions::covers_matrix(qs)) {
            fail(out, "adaptation_matrix", "paragraph " + std::to_string(key.first) + " lacks a matrix cell");
            return;
        }
    }
}

void fillers_absent(const SessionState& s, std::vector<Violation>& out) {
    std::set<std::string> fillers;
    for (const auto& f : analytics::default_fillers()) fillers.insert(text::ascii_lower(f));
    for (const auto& r : s.records) {
        for (const auto& t : r.tokens) {
            if (fillers.count(t)) {
                fail(out, "fillers_absent", r.record_id + " counts filler '" + t + "'");
                return;
            }
        }
    }
}

void diversity_bounded(const SessionState& s, std::vector<Violation>& out) {
    for (const auto& c : s.config.children) {
        const auto m = analytics::compute_engagement(s.records, c.child_id);
        if (m.lexical_diversity > m.productivity) {
            fail(out, "diversity_bounded", c.child_id + " has more distinct than total tokens");
            return;
        }
    }
}

void codes_in_range(const SessionState& s, std::vector<Violation>& out) {
    for (const auto& r : s.records) {
        for (auto d : {analytics::CodeDimension::topical_relevance, analytics::CodeDimension::intelligibility,
                       analytics::CodeDimension::accuracy}) {
            for (const auto* codes : {&r.manual_codes, &r.auto_codes}) {
                const auto v = codes->get(d);
                if (v && (*v < 0 || *v > analytics::max_code(d))) {
                    fail(out, "codes_in_range", r.record_id + " " + std::string(analytics::to_string(d)));
                    return;
                }
            }
        }
        if (r.auto_codes.intelligibility) {
            fail(out, "codes_in_range", r.record_id + " has a suggested intelligibility code");
            return;
        }
    }
}

void common_trace(const SessionState& s, std::vector<Violation>& out) {
    if (s.common && !characteristics::trace_is_total(*s.common)) {
        fail(out, "common_trace", "a common-summary sentence has no source");
    }
}

void distinct_roles(const SessionState& s, std::vector<Violation>& out) {
    if (s.roles && s.roles->storyteller == s.roles->storylistener) {
        fail(out, "distinct_roles", "storyteller and storylistener are the same child");
    }
}

void presented_by_command(const SessionState& s, std::vector<Violation>& out) {
    std::set<std::string> presented;
    for (const auto& e : s.event_log) {
        if (e.kind == "material_presented") presented.insert(e.payload.at("material_id").get<std::string>());
    }
    for (const auto& m : s.materials) {
        if (m.status == materials::MaterialStatus::presented && !presented.count(m.material_id)) {
            fail(out, "presented_by_command", m.material_id + " is presented without a command");
            return;
        }
    }
}

void replay_equality(const SessionState& s, std::vector<Violation>& out) {
    if (session::replay(s.event_log) != s) fail(out, "replay_equality", "folding the event log gives another state");
}

const std::vector<std::pair<std::string, Check>>& checks() {
    static const std::vector<std::pair<std::string, Check>> table = {
        {"gap_free_log", gap_free_log},
        {"version_matches_log", version_matches_log},
        {"framework_alternation", framework_alternation},
        {"framework_coverage", framework_coverage},
        {"cloze_round_trip", cloze_round_trip},
        {"blank_fairness", blank_fairness},
        {"storybook_alternation", storybook_alternation},
        {"storybook_coverage", storybook_coverage},
        {"provenance_replay", provenance_replay},
        {"question_fairness", question_fairness},
        {"question_language", question_language},
        {"cloze_question_excludes_word", cloze_question_excludes_word},
        {"adaptation_matrix", adaptation_matrix},
        {"fillers_absent", fillers_absent},
        {"diversity_bounded", diversity_bounded},
        {"codes_in_range", codes_in_range},
        {"common_trace", common_trace},
        {"distinct_roles", distinct_roles},
        {"presented_by_command", presented_by_command},
        {"replay_equality", replay_equality},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& names() {
    static const std::vector<std::string> out = [] {
        std::vector<std::string> n;
        for (const auto& [name, fn] : checks()) n.push_back(name);
        return n;
    }();
    return out;
}

std::vector<Violation> check(const SessionState& state, bool with_replay) {
    std::vector<Violation> out;
    for (const auto& [name, fn] : checks()) {
        if (!with_replay && name == "replay_equality") continue;
        try {
            fn(state, out);
        } catch (const Error& e) {
            out.push_back({name, e.what()});
        }
    }
    return out;
}

void require(const SessionState& state, bool with_replay) {
    const auto violations = check(state, with_replay);
    if (violations.empty()) return;
    Json all = Json::array();
    for (const auto& v : violations) all.push_back({{"name", v.name}, {"detail", v.detail}});
    throw Error(ErrorCode::InvariantFailure, violations.front().name + ": " + violations.front().detail,
                Json{{"invariant", violations.front().name}, {"violations", all}});
}

}  // namespace duet::invariants
