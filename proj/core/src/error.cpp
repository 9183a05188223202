#include "cocomo/error.hpp"

namespace cocomo {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::IllegalTransition: return "IllegalTransition";
    case Errc::TimeReversal: return "TimeReversal";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::DuplicateTask: return "DuplicateTask";
    case Errc::UnknownTask: return "UnknownTask";
    case Errc::NotUnconscious: return "NotUnconscious";
    case Errc::AlreadyAttending: return "AlreadyAttending";
    case Errc::NotAttending: return "NotAttending";
    case Errc::UnknownSemaphore: return "UnknownSemaphore";
    case Errc::DeadlockDetected: return "DeadlockDetected";
    case Errc::NonFiniteReward: return "NonFiniteReward";
    case Errc::EmptyArgument: return "EmptyArgument";
    case Errc::DepthExhausted: return "DepthExhausted";
    case Errc::EvaluatorFailure: return "EvaluatorFailure";
    case Errc::UnknownFixtureEntry: return "UnknownFixtureEntry";
    case Errc::ScoreOutOfRange: return "ScoreOutOfRange";
    case Errc::UnknownDocument: return "UnknownDocument";
    case Errc::InvalidDocument: return "InvalidDocument";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::MalformedTrace: return "MalformedTrace";
    case Errc::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace cocomo
