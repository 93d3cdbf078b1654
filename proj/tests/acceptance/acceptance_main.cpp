// duet-acceptance: one PASS/FAIL line per acceptance criterion. Exit status
// is the number of failed criteria.

#include "duet/analytics.hpp"
#include "duet/invariants.hpp"
#include "duet/script.hpp"

#include "http_e2e.hpp"
#include "negative.hpp"
#include "oracle.hpp"
#include "synthetic.hpp"
#include "walk.hpp"
#include "world.hpp"

#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

extern "C" unsigned long duet_netguard_operations();

using namespace duet;
using namespace duet::testing;
namespace fs = std::filesystem;

namespace {

// Pinned thresholds.
constexpr double kCliBudgetSeconds = 10.0;
constexpr int kSyntheticFrameworks = 200;
constexpr int kSelectionSequences = 1000;
constexpr int kSelectionSteps = 24;
constexpr int kLegalWalks = 100;
constexpr int kLegalWalkSteps = 150;
constexpr int kOracleShuffles = 200;

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("duet-acceptance-" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

// 1 -------------------------------------------------------------------------

Outcome cli_zoo_run() {
    Outcome o;
    const auto dir = scratch_dir("cli");
    const auto out = dir / "out";
    const auto net = dir / "net.txt";
    const std::string cmd = "env -u DUET_PROVIDER_MODE LD_PRELOAD=" + quote(DUET_NETGUARD_MODULE) +
                            " DUET_NETGUARD_OUT=" + quote(net.string()) + " " + quote(DUET_RUN_BINARY) +
                            " --script " + quote(zoo_dir() + "/script.json") + " --transcript " +
                            quote(zoo_dir() + "/transcript.json") + " --out " + quote(out.string()) + " > " +
                            quote((dir / "stdout.txt").string()) + " 2>&1";
    const auto started = std::chrono::steady_clock::now();
    const int status = std::system(cmd.c_str());
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (code != 0) {
        o.fail("exit " + std::to_string(code) + ": " + read_file(dir / "stdout.txt"));
        return o;
    }
    if (seconds >= kCliBudgetSeconds) o.fail("took " + std::to_string(seconds) + " s");

    unsigned long sockets = 1, connects = 1;
    std::istringstream(read_file(net)) >> sockets >> connects;
    if (sockets + connects != 0) o.fail(std::to_string(sockets) + " sockets, " + std::to_string(connects) + " connects");

    const Json doc = Json::parse(read_file(out / "storybook.json"));
    const auto book = doc.at("storybook").get<story::Storybook>();
    // Target words are chosen during preparation; take the last set from the log.
    profile::TargetWordSet target;
    const Json events = Json::parse(read_file(out / "events.json"));
    for (const auto& e : events.at("events")) {
        if (e.at("kind") == "target_words_set") target = e.at("payload").at("target_words").get<profile::TargetWordSet>();
    }
    int words = 0;
    for (const auto& [lang, list] : target.words_by_language) {
        for (const auto& w : list) {
            ++words;
            const bool present = std::any_of(book.paragraphs.begin(), book.paragraphs.end(), [&](const auto& p) {
                return p.language == lang && text::find_word(p.text, w, lang).has_value();
            });
            if (!present) o.fail("storybook lacks '" + w + "'");
        }
    }
    if (words != 9) o.fail("expected 9 target words, the session set " + std::to_string(words));
    for (std::size_t i = 1; i < book.paragraphs.size(); ++i) {
        if (book.paragraphs[i].language == book.paragraphs[i - 1].language) {
            o.fail("paragraphs " + std::to_string(i - 1) + " and " + std::to_string(i) + " share a language");
        }
    }
    if (story::replay_provenance(book.base, book.provenance) != book.paragraphs) {
        o.fail("provenance replay differs from the storybook");
    }
    if (o.pass) {
        std::ostringstream d;
        d << "exit 0 in " << std::fixed;
        d.precision(2);
        d << seconds << " s (< " << kCliBudgetSeconds << " s), 0 socket calls, " << words << " words over "
          << book.paragraphs.size() << " alternating paragraphs, provenance replays";
        o.detail = d.str();
    }
    return o;
}

// 2 -------------------------------------------------------------------------

Outcome cloze_round_trip() {
    Outcome o;
    std::mt19937 rng(20240101);
    std::size_t blanks = 0;
    for (int i = 0; i < kSyntheticFrameworks; ++i) {
        const auto s = synthetic_story(rng);
        auto cloze = story::to_cloze(s.framework, s.config.target_words);
        const auto all = cloze.blanks;
        for (const auto& b : all) cloze = story::fill_blank(cloze, b.blank_index, b.target_word, "lisa", true);
        blanks += all.size();
        const auto rebuilt = story::reconstruct(cloze);
        for (std::size_t p = 0; p < rebuilt.size(); ++p) {
            if (rebuilt[p].text != s.framework.paragraphs[p].text) {
                o.fail("framework " + std::to_string(i) + " paragraph " + std::to_string(p) + " differs");
            }
        }
    }
    if (o.pass) {
        o.detail = std::to_string(kSyntheticFrameworks) + " frameworks, " + std::to_string(blanks) +
                   " blanks, byte-identical";
    }
    return o;
}

// 3 -------------------------------------------------------------------------

Outcome selection_fairness() {
    Outcome o;
    ZooWorld world;
    const auto start = *world.run_until_phase(session::Phase::Cloze)->snapshot();
    std::mt19937 rng(3);
    std::size_t selections = 0, rejections = 0;
    int worst = 0;
    const std::vector<std::string> kids = {"lisa", "lele"};
    for (int seq = 0; seq < kSelectionSequences && o.pass; ++seq) {
        auto engine = session::Engine::restore(start, offline_context());
        for (int step = 0; step < kSelectionSteps; ++step) {
            const auto& child = kids[rng() % 2];
            engine->execute(teacher(), "ask_question",
                            {{"child_id", child}, {"text", "Q" + std::to_string(step)}, {"attribute", "action"},
                             {"blank_index", 1}});
            // Try to select a random proposed question, without override.
            const auto s = engine->snapshot();
            std::vector<std::string> proposed;
            for (const auto& q : s->questions) {
                if (q.status == questions::QuestionStatus::proposed) proposed.push_back(q.question_id);
            }
            const auto& pick = proposed[rng() % proposed.size()];
            const auto err = error_of([&] { engine->execute(teacher(), "select_question", {{"question_id", pick}}); });
            if (!err) {
                ++selections;
            } else if (*err == ErrorCode::FairnessViolation) {
                ++rejections;
            } else {
                o.fail("unexpected " + std::string(to_string(*err)));
            }
            const auto& ledger = engine->snapshot()->ledger.questions_selected;
            const int a = ledger.count("lisa") ? ledger.at("lisa") : 0;
            const int b = ledger.count("lele") ? ledger.at("lele") : 0;
            worst = std::max(worst, std::abs(a - b));
            if (std::abs(a - b) > 1) o.fail("sequence " + std::to_string(seq) + " reached |A-B| = " + std::to_string(std::abs(a - b)));
        }
    }
    if (o.pass) {
        o.detail = std::to_string(kSelectionSequences) + " sequences, " + std::to_string(selections) + " selections, " +
                   std::to_string(rejections) + " unfair attempts rejected, max |A-B| = " + std::to_string(worst);
    }
    return o;
}

// 4 -------------------------------------------------------------------------

Outcome question_coverage() {
    Outcome o;
    ZooWorld world;
    const auto s = world.run_prefix(world.script.actions.size())->snapshot();
    std::map<int, std::set<questions::Attribute>> attrs;
    std::map<int, std::set<questions::Explicitness>> kinds;
    std::size_t cloze_checked = 0;
    for (const auto& q : s->questions) {
        if (q.spec.stage == questions::QuestionStage::adaptation && !q.coordinator_authored) {
            attrs[q.spec.anchor.index].insert(q.spec.attribute);
            kinds[q.spec.anchor.index].insert(q.spec.explicitness);
        }
        if (q.spec.stage == questions::QuestionStage::cloze) {
            const auto& word = s->cloze->blank(q.spec.anchor.index).target_word;
            ++cloze_checked;
            if (text::contains_token(q.text, word)) o.fail(q.question_id + " names '" + word + "'");
        }
    }
    const auto paragraphs = s->cloze->base.paragraphs.size();
    for (std::size_t p = 0; p < paragraphs; ++p) {
        const int i = static_cast<int>(p);
        if (attrs[i].size() != questions::all_attributes().size()) {
            o.fail("paragraph " + std::to_string(p) + " covers " + std::to_string(attrs[i].size()) + " attributes");
        }
        if (kinds[i].size() != 2) o.fail("paragraph " + std::to_string(p) + " lacks a question type");
    }
    if (o.pass) {
        o.detail = std::to_string(paragraphs) + " paragraphs x 7 attributes x explicit/implicit, " +
                   std::to_string(cloze_checked) + " cloze questions free of their word";
    }
    return o;
}

// 5 -------------------------------------------------------------------------

Outcome analytics_oracle() {
    Outcome o;
    const auto oracle = load_analytics_oracle();
    std::mt19937 rng(5);
    for (const auto& child : oracle.children) {
        const auto base = analytics::compute_engagement(oracle.records, child);
        for (const auto& msg : compare_to_oracle(base, oracle.expected.at(child))) o.fail(msg);
        auto shuffled = oracle.records;
        for (int i = 0; i < kOracleShuffles; ++i) {
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            if (analytics::compute_engagement(shuffled, child) != base) o.fail(child + ": order changed the metrics");
        }
    }
    if (o.pass) {
        const auto lisa = analytics::compute_engagement(oracle.records, "lisa");
        const auto lele = analytics::compute_engagement(oracle.records, "lele");
        o.detail = "exact match (lisa relevance " + lisa.topical_relevance_mean.fraction() + ", accuracy " +
                   lisa.accuracy_mean.fraction() + "; lele intelligibility " + lele.intelligibility_mean.fraction() +
                   ", accuracy " + lele.accuracy_mean.fraction() + "), invariant over " +
                   std::to_string(kOracleShuffles) + " shuffles";
    }
    return o;
}

// 6 -------------------------------------------------------------------------

Outcome rejections_and_replay() {
    Outcome o;
    const auto cases = negative_cases();
    for (const auto& r : run_negative_cases(cases)) {
        if (!r.ok()) {
            o.fail(r.c->name + ": expected " + std::string(to_string(r.c->expected)) + ", got " +
                   (r.got ? std::string(to_string(*r.got)) : std::string("success")));
        }
    }
    ZooWorld world;
    const auto start = *world.run_until_phase(session::Phase::Cloze)->snapshot();
    std::mt19937 rng(6);
    std::size_t moves = 0, finished = 0;
    for (int i = 0; i < kLegalWalks; ++i) {
        auto engine = session::Engine::restore(start, offline_context());
        try {
            moves += random_walk(*engine, rng, kLegalWalkSteps).size();
        } catch (const Error& e) {
            o.fail("walk " + std::to_string(i) + " rejected a legal move: " + e.what());
            continue;
        }
        const auto s = engine->snapshot();
        finished += s->report.has_value();
        if (session::replay(s->event_log) != *s) o.fail("walk " + std::to_string(i) + " replays to a different state");
        const auto violations = invariants::check(*s);
        if (!violations.empty()) o.fail("walk " + std::to_string(i) + ": " + violations.front().name);
    }
    if (o.pass) {
        o.detail = std::to_string(cases.size()) + " rejections with named errors; " + std::to_string(kLegalWalks) +
                   " random legal sequences (" + std::to_string(moves) + " moves, " + std::to_string(finished) +
                   " reached the report) replay to equal state";
    }
    return o;
}

// 7 -------------------------------------------------------------------------

Outcome visibility() {
    Outcome o;
    const auto run = run_zoo_over_http();
    for (const auto& p : run.problems) o.fail(p);
    std::size_t child_frames = 0, hidden = 0;
    for (const auto& child : {"lisa", "lele"}) {
        for (const auto& f : run.frames.at(child)) {
            ++child_frames;
            if (f.at("visibility") != "all") o.fail(std::string(child) + " received " + f.at("kind").get<std::string>());
        }
    }
    for (const auto& f : run.frames.at("teacher")) hidden += f.at("visibility") == "coordinator_only";
    if (run.lisa_sse != run.frames.at("lisa")) o.fail("event-stream frames differ from long-poll frames");
    std::size_t probes = 0;
    for (const auto& [endpoint, by_child] : run.child_attempts) {
        for (const auto& [child, status] : by_child) {
            ++probes;
            if (status != 403) o.fail(endpoint + " returned " + std::to_string(status) + " to " + child);
        }
    }
    if (hidden == 0) o.fail("no coordinator-only frames were produced, so the check is vacuous");
    if (o.pass) {
        o.detail = std::to_string(child_frames) + " child frames, 0 coordinator_only (" + std::to_string(hidden) +
                   " withheld); " + std::to_string(probes) + " child probes of coordinator-only endpoints all 403";
    }
    return o;
}

// 8 -------------------------------------------------------------------------

Outcome record_replay() {
    Outcome o;
    const auto dir = scratch_dir("record");
    const auto transcript = (dir / "transcript.json").string();
    ZooWorld world;
    std::string recorded, replayed, committed;
    {
        gateway::Gateway gw(gateway::GatewayMode::record,
                            gateway::CannedProvider::load(zoo_dir() + "/canned.json"), {}, transcript);
        auto ctx = world.context();
        ctx.gateway = &gw;
        recorded = script::render_outputs(*script::run_script(world.script, ctx).engine->snapshot()).events;
    }
    unsigned long ops = 0;
    {
        gateway::Gateway gw(gateway::Transcript::load(transcript));
        auto ctx = world.context();
        ctx.gateway = &gw;
        const auto before = duet_netguard_operations();
        replayed = script::render_outputs(*script::run_script(world.script, ctx).engine->snapshot()).events;
        ops = duet_netguard_operations() - before;
    }
    {
        ZooWorld fresh;
        committed = script::render_outputs(*script::run_script(fresh.script, fresh.context()).engine->snapshot()).events;
    }
    // Positive control: the guard must see a socket opened here.
    const auto probe_before = duet_netguard_operations();
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd >= 0) ::close(fd);
    if (duet_netguard_operations() == probe_before) o.fail("socket guard is not intercepting calls");

    if (recorded != replayed) o.fail("replayed event log differs from the recording");
    if (replayed != committed) o.fail("fresh recording differs from the committed transcript's replay");
    if (ops != 0) o.fail(std::to_string(ops) + " socket operations during replay");
    if (o.pass) {
        o.detail = "event logs byte-identical (" + std::to_string(recorded.size()) +
                   " bytes, also equal to the committed fixture), 0 socket operations during replay";
    }
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int number;
        const char* title;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {1, "zoo script via CLI", cli_zoo_run},
        {2, "cloze round trip", cloze_round_trip},
        {3, "selection fairness", selection_fairness},
        {4, "question coverage", question_coverage},
        {5, "analytics oracle", analytics_oracle},
        {6, "rejections and replay", rejections_and_replay},
        {7, "role visibility", visibility},
        {8, "record then replay", record_replay},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.fail(std::string("threw: ") + e.what());
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.number << " (" << c.title << "): " << o.detail
                  << std::endl;
    }
    fs::remove_all(fs::temp_directory_path() / ("duet-acceptance-" + std::to_string(::getpid())));
    return failed;
}
