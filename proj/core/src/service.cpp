#include "duet/service.hpp"

#include <openssl/rand.h>

#include <chrono>
#include <filesystem>
#include <regex>

namespace duet::service {

using session::Engine;
using session::ParticipantRole;
using session::Visibility;

namespace {

std::string random_hex(std::size_t bytes) {
    std::vector<unsigned char> buf(bytes);
    if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1) {
        throw Error(ErrorCode::InvariantViolation, "random source unavailable");
    }
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned char c : buf) {
        out += digits[c >> 4];
        out += digits[c & 0xf];
    }
    return out;
}

bool valid_session_id(const std::string& id) {
    static const std::regex pattern("[A-Za-z0-9_-]{1,64}");
    return std::regex_match(id, pattern);
}

Credentials mint_credentials(const profile::SessionConfig& config) {
    Credentials creds;
    creds.emplace(random_hex(16), Actor::coordinator(config.coordinator_id));
    for (const auto& c : config.children) creds.emplace(random_hex(16), Actor::child(c.child_id));
    return creds;
}

}  // namespace

Json snapshot_json(const SessionState& state, const Credentials& credentials) {
    Json creds = Json::object();
    for (const auto& [token, actor] : credentials) {
        creds[token] = {{"participant_id", actor.participant_id}, {"role", actor.role}};
    }
    return Json{{"schema_version", kSnapshotSchemaVersion}, {"state", state}, {"credentials", creds}};
}

SessionState load_snapshot(const Json& snapshot, Credentials* credentials) {
    if (!snapshot.is_object() || !snapshot.contains("schema_version")) {
        throw Error(ErrorCode::SchemaMismatch, "snapshot has no schema_version");
    }
    const auto version = snapshot.at("schema_version");
    if (!version.is_number_integer() || version.get<int>() != kSnapshotSchemaVersion) {
        throw Error(ErrorCode::SchemaMismatch, "unsupported snapshot schema_version " + version.dump(),
                    Json{{"supported", kSnapshotSchemaVersion}});
    }
    try {
        auto state = snapshot.at("state").get<SessionState>();
        if (credentials) {
            credentials->clear();
            const auto creds = snapshot.value("credentials", Json::object());
            for (const auto& [token, j] : creds.items()) {
                credentials->emplace(token, Actor{j.at("participant_id").get<std::string>(),
                                                  j.at("role").get<ParticipantRole>()});
            }
        }
        return state;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaMismatch, std::string("snapshot: ") + e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::SchemaMismatch, std::string("snapshot: ") + e.what());
    }
}

std::vector<Json> role_frames(const std::vector<session::Event>& log, ParticipantRole role, std::uint64_t after) {
    std::vector<Json> out;
    std::uint64_t seq = 0;
    for (const auto& e : log) {
        if (role == ParticipantRole::child && e.visibility != Visibility::all) continue;
        if (++seq <= after) continue;
        Json frame = session::to_frame(e);
        frame["event_seq"] = e.seq;
        frame["seq"] = seq;
        out.push_back(std::move(frame));
    }
    return out;
}

// ---------------------------------------------------------------------------

Service::Service(ServiceOptions options) : options_(std::move(options)) {}

std::shared_ptr<Service::Hosted> Service::find(const std::string& session_id) const {
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + session_id + "'");
    return it->second;
}

std::shared_ptr<Service::Hosted> Service::host(SessionState state, Credentials credentials) {
    auto hosted = std::make_shared<Hosted>();
    hosted->persisted_version = state.version;
    hosted->engine = Engine::restore(std::move(state), options_.context);
    hosted->credentials = std::move(credentials);
    return hosted;
}

OpenedSession Service::create_session(std::string session_id, profile::SessionConfig config) {
    if (session_id.empty()) session_id = "s" + random_hex(6);
    if (!valid_session_id(session_id)) {
        throw Error(ErrorCode::BadArguments, "session id must match [A-Za-z0-9_-]{1,64}");
    }
    auto hosted = std::make_shared<Hosted>();
    hosted->credentials = mint_credentials(config);
    hosted->engine = Engine::open(session_id, std::move(config), options_.context);
    {
        std::lock_guard lock(sessions_mutex_);
        if (sessions_.count(session_id)) throw Error(ErrorCode::BadArguments, "session '" + session_id + "' exists");
        sessions_[session_id] = hosted;
    }
    persist(session_id, *hosted);
    OpenedSession opened{session_id, {}};
    for (const auto& [token, actor] : hosted->credentials) opened.tokens[actor.participant_id] = token;
    return opened;
}

Actor Service::authenticate(const std::string& session_id, const std::string& token) const {
    const auto hosted = find(session_id);
    auto it = hosted->credentials.find(token);
    if (it == hosted->credentials.end()) throw Error(ErrorCode::Unauthorized, "unknown credential");
    return it->second;
}

session::CommandResult Service::join(const std::string& session_id, const std::string& token) {
    return command(session_id, token, "join", Json::object());
}

session::CommandResult Service::command(const std::string& session_id, const std::string& token,
                                        const std::string& name, const Json& args) {
    const auto hosted = find(session_id);
    const Actor actor = authenticate(session_id, token);
    if (name == "join") {
        auto own = args.is_object() ? args : Json::object();
        own["participant_id"] = actor.participant_id;
        auto result = hosted->engine->execute(actor, name, own);
        persist(session_id, *hosted);
        return result;
    }
    auto result = hosted->engine->execute(actor, name, args);
    if (result.event) persist(session_id, *hosted);
    return result;
}

void Service::persist(const std::string& session_id, Hosted& hosted) {
    {
        std::lock_guard lock(hosted.persist_mutex);
        const auto state = hosted.engine->snapshot();
        if (!options_.data_dir.empty() && state->version > hosted.persisted_version) {
            const auto path = std::filesystem::path(options_.data_dir) / (session_id + ".json");
            write_text_file_atomic(path.string(), dump_stable(snapshot_json(*state, hosted.credentials)));
        }
        hosted.persisted_version = std::max(hosted.persisted_version, state->version);
    }
    {
        std::lock_guard lock(hosted.wait_mutex);
    }
    hosted.changed.notify_all();
}

std::vector<Json> Service::frames(const std::string& session_id, const std::string& token, std::uint64_t after,
                                  int wait_ms) {
    const auto hosted = find(session_id);
    const Actor actor = authenticate(session_id, token);
    auto collect = [&] { return role_frames(hosted->engine->snapshot()->event_log, actor.role, after); };
    auto out = collect();
    if (!out.empty() || wait_ms <= 0) return out;
    std::unique_lock lock(hosted->wait_mutex);
    hosted->changed.wait_for(lock, std::chrono::milliseconds(wait_ms), [&] {
        out = collect();
        return !out.empty();
    });
    return out;
}

Json Service::save_snapshot(const std::string& session_id, const std::string& token) const {
    const auto hosted = find(session_id);
    if (authenticate(session_id, token).role != ParticipantRole::coordinator) {
        throw Error(ErrorCode::Unauthorized, "snapshots are coordinator-only");
    }
    return snapshot_json(*hosted->engine->snapshot(), hosted->credentials);
}

std::string Service::restore_snapshot(const Json& snapshot) {
    Credentials creds;
    auto state = load_snapshot(snapshot, &creds);
    const std::string id = state.session_id;
    if (!valid_session_id(id)) throw Error(ErrorCode::SchemaMismatch, "snapshot carries an unusable session id");
    if (creds.empty()) creds = mint_credentials(state.config);
    auto hosted = host(std::move(state), std::move(creds));
    {
        std::lock_guard lock(sessions_mutex_);
        sessions_[id] = hosted;
    }
    return id;
}

std::shared_ptr<const SessionState> Service::state(const std::string& session_id) const {
    return find(session_id)->engine->snapshot();
}

std::vector<std::string> Service::session_ids() const {
    std::lock_guard lock(sessions_mutex_);
    std::vector<std::string> ids;
    for (const auto& [id, hosted] : sessions_) ids.push_back(id);
    return ids;
}

std::size_t Service::load_data_dir() {
    namespace fs = std::filesystem;
    if (options_.data_dir.empty() || !fs::is_directory(options_.data_dir)) return 0;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(options_.data_dir)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) restore_snapshot(read_json_file(f.string(), ErrorCode::SchemaMismatch));
    return files.size();
}

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::Unauthorized: return 403;
        case ErrorCode::UnknownSession:
        case ErrorCode::UnknownCommand: return 404;
        case ErrorCode::BadArguments:
        case ErrorCode::InvalidConfig:
        case ErrorCode::SchemaMismatch:
        case ErrorCode::EmptyInput:
        case ErrorCode::OutOfRange:
        case ErrorCode::DuplicateWord:
        case ErrorCode::InvariantViolation: return 400;
        case ErrorCode::GenerationUnavailable:
        case ErrorCode::ProviderError:
        case ErrorCode::MissingFixture: return 503;
        case ErrorCode::IoError: return 500;
        default: return 409;
    }
}

}  // namespace duet::service
