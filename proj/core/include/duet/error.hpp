#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace duet {

/// Every failure the engine reports carries one of these codes. The names are
/// part of the wire format (service error bodies, CLI diagnostics).
enum class ErrorCode {
    EmptyInput,
    InvariantViolation,
    WrongPhase,
    DuplicateWord,
    GenerationUnavailable,
    UnboundVariable,
    UnknownVariable,
    MalformedOutput,
    ValidationFailed,
    WrongStatus,
    WordNotFound,
    AlreadyFilled,
    NotStoryteller,
    AlternationViolation,
    FairnessViolation,
    UnknownQuestion,
    UnknownMaterial,
    UnknownParticipant,
    InvalidConfig,
    IllegalTransition,
    GuardFailed,
    NoContributionYet,
    ExtensionRoundsExhausted,
    QuestionNotSelected,
    WrongChild,
    OutOfRange,
    GatewayCannotCode,
    MissingFixture,
    ProviderError,
    Unauthorized,
    UnknownSession,
    SchemaMismatch,
    ScriptParseError,
    InvariantFailure,
    UnknownCommand,
    BadArguments,
    UnknownBlank,
    UnknownRecord,
    IoError,
};

std::string_view to_string(ErrorCode code);
ErrorCode error_code_from_string(std::string_view name);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, nlohmann::json details = nullptr);

    ErrorCode code() const noexcept { return code_; }
    /// The message without the leading code name that what() carries.
    const std::string& message() const noexcept { return message_; }
    const nlohmann::json& details() const noexcept { return details_; }

    /// {"error": <code name>, "message": ..., "details": ...}
    nlohmann::json to_json() const;

private:
    ErrorCode code_;
    std::string message_;
    nlohmann::json details_;
};

}  // namespace duet
