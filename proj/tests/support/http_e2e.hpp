#pragma once

#include "duet/service.hpp"

#include <map>
#include <string>
#include <vector>

namespace duet::testing {

struct HttpE2e {
    std::string session_id;
    std::size_t actions = 0;
    /// Role streams fetched over long-poll JSON after the run.
    std::map<std::string, std::vector<Json>> frames;
    /// The same child stream read back as server-sent events.
    std::vector<Json> lisa_sse;
    /// Coordinator-only endpoint -> HTTP status returned to each child token.
    std::map<std::string, std::map<std::string, int>> child_attempts;
    Json final_snapshot;
    std::vector<std::string> problems;
};

/// Serves the replayed zoo session on an ephemeral loopback port, drives
/// every script action through the HTTP endpoints with each actor's bearer
/// token, then probes every coordinator-only endpoint with both child tokens.
HttpE2e run_zoo_over_http();

/// Parses "data:" payloads out of an event-stream body.
std::vector<Json> parse_sse(const std::string& body);

}  // namespace duet::testing
