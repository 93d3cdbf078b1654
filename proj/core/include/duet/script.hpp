#pragma once

#include "duet/engine.hpp"

#include <optional>
#include <string>
#include <vector>

namespace duet::script {

struct Action {
    std::string actor;
    std::string command;
    Json args = Json::object();
    /// Error code name the action must fail with; the run continues afterwards.
    std::optional<std::string> expect_error;

    bool operator==(const Action&) const = default;
};

struct SessionScript {
    std::string session_id = "session";
    profile::SessionConfig config;
    std::vector<Action> actions;

    bool operator==(const SessionScript&) const = default;
};

/// ScriptParseError on malformed documents, unknown commands, undeclared
/// actors or unknown error names.
SessionScript parse_script(const Json& doc);
SessionScript load_script(const std::string& path);
Json to_json(const SessionScript& script);

struct RunOptions {
    /// Check invariants after every applied action, not only at the end.
    bool check_each_step = true;
};

struct RunResult {
    std::unique_ptr<session::Engine> engine;
    std::vector<session::CommandResult> results;
};

/// Runs every action in order against a fresh engine.
/// A rejected action that was not expected raises InvariantFailure whose
/// details.invariant is the rejecting error code; replay misses surface as
/// MissingFixture.
RunResult run_script(const SessionScript& script, const session::EngineContext& context, RunOptions options = {});

struct OutputFiles {
    std::string storybook;
    std::string events;
    std::string report;
    std::string report_text;
};

/// Renders the four output documents. The report is computed from the
/// records when the script never built one.
OutputFiles render_outputs(const session::SessionState& state);
void write_outputs(const session::SessionState& state, const std::string& out_dir);

}  // namespace duet::script
