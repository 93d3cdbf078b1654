// duet-run: executes a session script in-process and writes its outputs.
//
// Exit status: 0 success, 1 other failure, 2 ScriptParseError,
// 3 MissingFixture, 4 InvariantFailure.

#include "CLI11.hpp"

#include "duet/gateway.hpp"
#include "duet/script.hpp"

#include <chrono>
#include <iostream>

using namespace duet;

namespace {

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::ScriptParseError: return 2;
        case ErrorCode::MissingFixture: return 3;
        case ErrorCode::InvariantFailure: return 4;
        default: return 1;
    }
}

std::string label(const Error& e) {
    std::string out(to_string(e.code()));
    if (e.details().is_object() && e.details().contains("invariant")) {
        out += "(" + e.details().at("invariant").get<std::string>() + ")";
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Run a scripted storytelling session against the in-process engine"};
    std::string script_path, transcript_path, out_dir, provider_config;
    std::string templates_dir, guidelines_dir = DUET_DEFAULT_GUIDELINES_DIR;
    bool check_only = false, quiet = false;
    app.add_option("--script", script_path, "Session script (JSON)")->required();
    app.add_option("--transcript", transcript_path, "Gateway transcript; written in record mode");
    app.add_option("--out", out_dir, "Directory for storybook.json, events.json, report.json, report.txt");
    app.add_flag("--check-only", check_only, "Parse and validate the script without running it");
    app.add_option("--provider-config", provider_config, "Provider config; defaults to replay mode");
    app.add_option("--templates-dir", templates_dir, "Prompt templates overriding the built-in ones");
    app.add_option("--guidelines-dir", guidelines_dir, "Guideline rule files");
    app.add_flag("-q,--quiet", quiet, "Only report failures");
    CLI11_PARSE(app, argc, argv);

    const auto started = std::chrono::steady_clock::now();
    try {
        const auto script = script::load_script(script_path);
        if (check_only) {
            if (!quiet) std::cout << "ok: " << script.actions.size() << " actions\n";
            return 0;
        }
        if (transcript_path.empty()) throw Error(ErrorCode::BadArguments, "--transcript is required to run");
        if (out_dir.empty()) throw Error(ErrorCode::BadArguments, "--out is required to run");

        gateway::ProviderConfig config;
        if (!provider_config.empty()) {
            config = gateway::ProviderConfig::load(provider_config);
        } else {
            config.apply_env_overrides();
        }
        auto gw = gateway::Gateway::from_config(config, transcript_path);
        auto templates = gateway::TemplateLibrary::builtin();
        if (!templates_dir.empty()) templates.merge(gateway::TemplateLibrary::load_dir(templates_dir));
        const auto guidelines = characteristics::GuidelineSet::load_dir(guidelines_dir);

        session::EngineContext ctx{gw.get(), &templates, &guidelines, session::logical_clock()};
        const auto run = script::run_script(script, ctx);
        const auto state = run.engine->snapshot();
        script::write_outputs(*state, out_dir);

        if (!quiet) {
            const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                                  started)
                                .count();
            std::cout << "ok: " << state->event_log.size() << " events, phase " << to_string(state->phase) << ", "
                      << gw->completions() << " generation calls (" << gateway::to_string(gw->mode()) << "), "
                      << gateway::network_operations() << " network operations, " << ms << " ms\n";
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << label(e) << ": " << e.message() << "\n";
        if (!e.details().is_null()) std::cerr << e.details().dump(2) << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
