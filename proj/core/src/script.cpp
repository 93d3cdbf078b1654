#include "duet/script.hpp"

#include "duet/invariants.hpp"

#include <algorithm>
#include <filesystem>

namespace duet::script {

using session::Actor;
using session::Engine;

namespace {

Error parse_error(const std::string& message) {
    return Error(ErrorCode::ScriptParseError, message);
}

Action parse_action(const Json& j, std::size_t i, const profile::SessionConfig& config) {
    const std::string where = "actions[" + std::to_string(i) + "]";
    if (!j.is_object()) throw parse_error(where + " is not an object");
    Action a;
    a.actor = optional_field<std::string>(j, "actor", config.coordinator_id, ErrorCode::ScriptParseError);
    a.command = required_field<std::string>(j, "command", ErrorCode::ScriptParseError);
    if (j.contains("args")) {
        if (!j.at("args").is_object()) throw parse_error(where + ".args is not an object");
        a.args = j.at("args");
    }
    if (j.contains("expect_error") && !j.at("expect_error").is_null()) {
        a.expect_error = required_field<std::string>(j, "expect_error", ErrorCode::ScriptParseError);
        try {
            error_code_from_string(*a.expect_error);
        } catch (const Error&) {
            throw parse_error(where + " expects unknown error '" + *a.expect_error + "'");
        }
    }
    const auto& names = Engine::command_names();
    if (std::find(names.begin(), names.end(), a.command) == names.end()) {
        throw parse_error(where + " uses unknown command '" + a.command + "'");
    }
    if (a.actor != config.coordinator_id && !config.has_child(a.actor)) {
        throw parse_error(where + " names undeclared participant '" + a.actor + "'");
    }
    return a;
}

Actor actor_for(const profile::SessionConfig& config, const std::string& id) {
    return config.has_child(id) ? Actor::child(id) : Actor::coordinator(id);
}

bool is_missing_fixture(const Error& e) {
    if (e.code() == ErrorCode::MissingFixture) return true;
    return e.code() == ErrorCode::GenerationUnavailable && e.details().is_object() &&
           e.details().value("cause", std::string{}) == "MissingFixture";
}

}  // namespace

SessionScript parse_script(const Json& doc) {
    if (!doc.is_object()) throw parse_error("script must be a JSON object");
    SessionScript s;
    s.session_id = optional_field<std::string>(doc, "session_id", s.session_id, ErrorCode::ScriptParseError);
    try {
        s.config = required_field<profile::SessionConfig>(doc, "config", ErrorCode::ScriptParseError);
        profile::validate_config(s.config);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ScriptParseError) throw;
        throw parse_error("config: " + std::string(e.what()));
    }
    if (!doc.contains("actions") || !doc.at("actions").is_array()) throw parse_error("script needs an actions array");
    const auto& actions = doc.at("actions");
    for (std::size_t i = 0; i < actions.size(); ++i) s.actions.push_back(parse_action(actions[i], i, s.config));
    return s;
}

SessionScript load_script(const std::string& path) {
    return parse_script(read_json_file(path, ErrorCode::ScriptParseError));
}

Json to_json(const SessionScript& script) {
    Json actions = Json::array();
    for (const auto& a : script.actions) {
        Json j{{"actor", a.actor}, {"command", a.command}, {"args", a.args}};
        if (a.expect_error) j["expect_error"] = *a.expect_error;
        actions.push_back(std::move(j));
    }
    return Json{{"session_id", script.session_id}, {"config", script.config}, {"actions", actions}};
}

RunResult run_script(const SessionScript& script, const session::EngineContext& context, RunOptions options) {
    RunResult run;
    run.engine = Engine::open(script.session_id, script.config, context);
    for (std::size_t i = 0; i < script.actions.size(); ++i) {
        const auto& a = script.actions[i];
        const Json where{{"action", i}, {"command", a.command}};
        try {
            run.results.push_back(run.engine->execute(actor_for(script.config, a.actor), a.command, a.args));
        } catch (const Error& e) {
            if (is_missing_fixture(e)) {
                throw Error(ErrorCode::MissingFixture,
                            "no recorded reply for action " + std::to_string(i) + " (" + a.command + ")",
                            Json{{"action", i}, {"cause", e.to_json()}});
            }
            if (a.expect_error && *a.expect_error == to_string(e.code())) continue;
            Json details = where;
            details["invariant"] = std::string(to_string(e.code()));
            details["cause"] = e.to_json();
            throw Error(ErrorCode::InvariantFailure, e.what(), details);
        }
        if (a.expect_error) {
            Json details = where;
            details["invariant"] = "expected_error";
            throw Error(ErrorCode::InvariantFailure,
                        "action " + std::to_string(i) + " (" + a.command + ") should fail with " + *a.expect_error,
                        details);
        }
        if (options.check_each_step) invariants::require(*run.engine->snapshot(), false);
    }
    invariants::require(*run.engine->snapshot(), true);
    return run;
}

OutputFiles render_outputs(const session::SessionState& state) {
    OutputFiles out;
    Json book = Json::object();
    if (state.storybook) {
        book = Json{{"storybook", *state.storybook},
                    {"alternates", story::alternates(state.storybook->paragraphs)},
                    {"plain_text", story::storybook_plain_text(*state.storybook)}};
    }
    out.storybook = dump_stable(book);
    out.events = dump_stable(Json{{"session_id", state.session_id}, {"events", state.event_log}});
    const auto report = state.report ? *state.report : analytics::build_report(state.records, state.config);
    out.report = dump_stable(report);
    out.report_text = analytics::report_text(report);
    return out;
}

void write_outputs(const session::SessionState& state, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto files = render_outputs(state);
    write_text_file_atomic((fs::path(out_dir) / "storybook.json").string(), files.storybook);
    write_text_file_atomic((fs::path(out_dir) / "events.json").string(), files.events);
    write_text_file_atomic((fs::path(out_dir) / "report.json").string(), files.report);
    write_text_file_atomic((fs::path(out_dir) / "report.txt").string(), files.report_text);
}

}  // namespace duet::script
