#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cocomo {

enum class Errc {
    IllegalTransition,
    TimeReversal,
    InvalidConfig,
    DuplicateTask,
    UnknownTask,
    NotUnconscious,
    AlreadyAttending,
    NotAttending,
    UnknownSemaphore,
    DeadlockDetected,
    NonFiniteReward,
    EmptyArgument,
    DepthExhausted,
    EvaluatorFailure,
    UnknownFixtureEntry,
    ScoreOutOfRange,
    UnknownDocument,
    InvalidDocument,
    ParseError,
    ValidationError,
    MalformedTrace,
    Io,
};

std::string_view to_string(Errc code) noexcept;

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace cocomo
