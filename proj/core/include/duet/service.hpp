#pragma once

#include "duet/engine.hpp"

#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace duet::service {

using session::Actor;
using session::SessionState;

inline constexpr int kSnapshotSchemaVersion = 1;

/// Bearer token -> participant.
using Credentials = std::map<std::string, Actor>;

Json snapshot_json(const SessionState& state, const Credentials& credentials);
/// SchemaMismatch unless schema_version is supported.
SessionState load_snapshot(const Json& snapshot, Credentials* credentials = nullptr);

/// Events a role may see, framed with a per-role gap-free seq starting at 1.
/// Frame: {seq, event_seq, kind, payload, visibility}.
std::vector<Json> role_frames(const std::vector<session::Event>& log, session::ParticipantRole role,
                              std::uint64_t after = 0);

struct ServiceOptions {
    /// One `<session_id>.json` snapshot per session; empty disables persistence.
    std::string data_dir;
    session::EngineContext context;
};

struct OpenedSession {
    std::string session_id;
    /// participant id -> bearer token
    std::map<std::string, std::string> tokens;
};

/// Transport-independent session host. Every method is thread-safe.
class Service {
public:
    explicit Service(ServiceOptions options);

    /// InvalidConfig; BadArguments for an unusable or taken id. An empty id is generated.
    OpenedSession create_session(std::string session_id, profile::SessionConfig config);

    /// UnknownSession; Unauthorized for an unknown token.
    Actor authenticate(const std::string& session_id, const std::string& token) const;

    session::CommandResult join(const std::string& session_id, const std::string& token);
    session::CommandResult command(const std::string& session_id, const std::string& token, const std::string& name,
                                   const Json& args);

    /// Role-filtered frames after stream position `after`. Blocks up to
    /// `wait_ms` when nothing new is available.
    std::vector<Json> frames(const std::string& session_id, const std::string& token, std::uint64_t after,
                             int wait_ms = 0);

    /// Coordinator credential required.
    Json save_snapshot(const std::string& session_id, const std::string& token) const;
    /// Replaces or registers the session from a snapshot document.
    std::string restore_snapshot(const Json& snapshot);

    std::shared_ptr<const SessionState> state(const std::string& session_id) const;
    std::vector<std::string> session_ids() const;

    /// Loads every snapshot in the data directory; returns how many.
    std::size_t load_data_dir();

private:
    struct Hosted {
        std::unique_ptr<session::Engine> engine;
        Credentials credentials;
        std::mutex persist_mutex;
        std::uint64_t persisted_version = 0;
        std::mutex wait_mutex;
        std::condition_variable changed;
    };

    std::shared_ptr<Hosted> find(const std::string& session_id) const;
    void persist(const std::string& session_id, Hosted& hosted);
    std::shared_ptr<Hosted> host(SessionState state, Credentials credentials);

    ServiceOptions options_;
    mutable std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Hosted>> sessions_;
};

/// HTTP status used for an error code.
int http_status(ErrorCode code);

/// Registers the endpoint catalog on `server`:
///   POST /sessions                               create
///   POST /sessions/{id}/join                     join (bearer)
///   POST /sessions/{id}/commands/{name}          command (bearer)
///   GET  /sessions/{id}/events?after=N&wait_ms=M frames as JSON, or SSE with Accept: text/event-stream
///   GET  /sessions/{id}/snapshot                 save (coordinator bearer)
///   PUT  /sessions/{id}/snapshot                 load
void mount(httplib::Server& server, Service& service);

}  // namespace duet::service
