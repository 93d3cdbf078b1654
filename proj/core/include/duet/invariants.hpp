#pragma once

#include "duet/session.hpp"

#include <string>
#include <vector>

namespace duet::invariants {

struct Violation {
    std::string name;
    std::string detail;

    bool operator==(const Violation&) const = default;
};

/// Names of every invariant `check` evaluates, in evaluation order.
const std::vector<std::string>& names();

/// Evaluates every module invariant that applies to the state's progress.
/// Replay equality is the expensive one; pass `with_replay = false` to skip it.
std::vector<Violation> check(const session::SessionState& state, bool with_replay = true);

/// Throws InvariantFailure naming the first violation.
void require(const session::SessionState& state, bool with_replay = true);

}  // namespace duet::invariants
