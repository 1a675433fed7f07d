#pragma once

#include <stdexcept>
#include <string>

namespace qwz {

enum class ErrorKind {
    ZeroDenominator,
    ZeroInput,
    ParseError,
    NotQProper,
    PoleEncountered,
    NoExactRoot,
    DivergentLimit,
    AmbiguousLimit,
    NoRecurrenceUpToOrder,
    VerificationFailed,
    OrderMismatch,
    NotWZNormalized,
    QTooCloseToOne,
    NoDecayDetected,
    TermwiseMismatch,
    RHSDivergence,
    DuplicateId,
    UnknownId,
    QOutsideValidity,
    NoPairAttached,
    NoLimitTarget,
    InvalidArgument,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::ZeroInput: return "ZeroInput";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NotQProper: return "NotQProper";
    case ErrorKind::PoleEncountered: return "PoleEncountered";
    case ErrorKind::NoExactRoot: return "NoExactRoot";
    case ErrorKind::DivergentLimit: return "DivergentLimit";
    case ErrorKind::AmbiguousLimit: return "AmbiguousLimit";
    case ErrorKind::NoRecurrenceUpToOrder: return "NoRecurrenceUpToOrder";
    case ErrorKind::VerificationFailed: return "VerificationFailed";
    case ErrorKind::OrderMismatch: return "OrderMismatch";
    case ErrorKind::NotWZNormalized: return "NotWZNormalized";
    case ErrorKind::QTooCloseToOne: return "QTooCloseToOne";
    case ErrorKind::NoDecayDetected: return "NoDecayDetected";
    case ErrorKind::TermwiseMismatch: return "TermwiseMismatch";
    case ErrorKind::RHSDivergence: return "RHSDivergence";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::UnknownId: return "UnknownId";
    case ErrorKind::QOutsideValidity: return "QOutsideValidity";
    case ErrorKind::NoPairAttached: return "NoPairAttached";
    case ErrorKind::NoLimitTarget: return "NoLimitTarget";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ParseError : public Error {
public:
    ParseError(int line, const std::string& reason)
        : Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + reason), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& what) { throw Error(k, what); }

}  // namespace qwz
