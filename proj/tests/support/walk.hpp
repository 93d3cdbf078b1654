#pragma once

#include "duet/engine.hpp"

#include <random>
#include <string>
#include <vector>

namespace duet::testing {

struct Move {
    session::Actor actor;
    std::string command;
    Json args = Json::object();
};

/// Every move that is legal in `state` and needs no generation gateway:
/// coordinator-asked questions, fair selections, answers, coding, skips,
/// fills, adaptations, extensions, rotations, phase advances and the report.
/// Empty once the report is built.
std::vector<Move> legal_moves(const session::SessionState& state, std::mt19937& rng);

/// Applies up to `max_steps` random legal moves. Throws whatever the engine
/// throws, so an exception means a legal move was rejected.
std::vector<Move> random_walk(session::Engine& engine, std::mt19937& rng, int max_steps);

/// Engine context with no gateway at all; any generation attempt fails.
session::EngineContext offline_context();

}  // namespace duet::testing
