#include "duet/error.hpp"

#include <array>
#include <utility>

namespace duet {

namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 39> kNames{{
    {ErrorCode::EmptyInput, "EmptyInput"},
    {ErrorCode::InvariantViolation, "InvariantViolation"},
    {ErrorCode::WrongPhase, "WrongPhase"},
    {ErrorCode::DuplicateWord, "DuplicateWord"},
    {ErrorCode::GenerationUnavailable, "GenerationUnavailable"},
    {ErrorCode::UnboundVariable, "UnboundVariable"},
    {ErrorCode::UnknownVariable, "UnknownVariable"},
    {ErrorCode::MalformedOutput, "MalformedOutput"},
    {ErrorCode::ValidationFailed, "ValidationFailed"},
    {ErrorCode::WrongStatus, "WrongStatus"},
    {ErrorCode::WordNotFound, "WordNotFound"},
    {ErrorCode::AlreadyFilled, "AlreadyFilled"},
    {ErrorCode::NotStoryteller, "NotStoryteller"},
    {ErrorCode::AlternationViolation, "AlternationViolation"},
    {ErrorCode::FairnessViolation, "FairnessViolation"},
    {ErrorCode::UnknownQuestion, "UnknownQuestion"},
    {ErrorCode::UnknownMaterial, "UnknownMaterial"},
    {ErrorCode::UnknownParticipant, "UnknownParticipant"},
    {ErrorCode::InvalidConfig, "InvalidConfig"},
    {ErrorCode::IllegalTransition, "IllegalTransition"},
    {ErrorCode::GuardFailed, "GuardFailed"},
    {ErrorCode::NoContributionYet, "NoContributionYet"},
    {ErrorCode::ExtensionRoundsExhausted, "ExtensionRoundsExhausted"},
    {ErrorCode::QuestionNotSelected, "QuestionNotSelected"},
    {ErrorCode::WrongChild, "WrongChild"},
    {ErrorCode::OutOfRange, "OutOfRange"},
    {ErrorCode::GatewayCannotCode, "GatewayCannotCode"},
    {ErrorCode::MissingFixture, "MissingFixture"},
    {ErrorCode::ProviderError, "ProviderError"},
    {ErrorCode::Unauthorized, "Unauthorized"},
    {ErrorCode::UnknownSession, "UnknownSession"},
    {ErrorCode::SchemaMismatch, "SchemaMismatch"},
    {ErrorCode::ScriptParseError, "ScriptParseError"},
    {ErrorCode::InvariantFailure, "InvariantFailure"},
    {ErrorCode::UnknownCommand, "UnknownCommand"},
    {ErrorCode::BadArguments, "BadArguments"},
    {ErrorCode::UnknownBlank, "UnknownBlank"},
    {ErrorCode::UnknownRecord, "UnknownRecord"},
    {ErrorCode::IoError, "IoError"},
}};

std::string compose(ErrorCode code, const std::string& message) {
    std::string out{to_string(code)};
    if (!message.empty()) {
        out += ": ";
        out += message;
    }
    return out;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
    for (const auto& [c, name] : kNames) {
        if (c == code) return name;
    }
    return "Unknown";
}

ErrorCode error_code_from_string(std::string_view name) {
    for (const auto& [c, n] : kNames) {
        if (n == name) return c;
    }
    throw Error(ErrorCode::BadArguments, "unknown error code '" + std::string(name) + "'");
}

Error::Error(ErrorCode code, const std::string& message, nlohmann::json details)
    : std::runtime_error(compose(code, message)), code_(code), message_(message), details_(std::move(details)) {}

nlohmann::json Error::to_json() const {
    nlohmann::json j{{"error", std::string(to_string(code_))}, {"message", what()}};
    if (!details_.is_null()) j["details"] = details_;
    return j;
}

}  // namespace duet
