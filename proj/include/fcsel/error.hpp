#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fcsel {

/// Broad failure classes. The service maps them to HTTP statuses and the
/// CLI maps them to exit codes.
enum class ErrorCode {
    validation,            // caller supplied malformed or inconsistent input
    not_found,             // referenced file, session or product does not exist
    unprocessable,         // input parsed but nothing usable remained
    insufficient_history,  // series too short for the requested operation
    degenerate,            // numerically degenerate input (zero variance, singular fit)
    runtime,               // anything else
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::validation: return "validation";
        case ErrorCode::not_found: return "not_found";
        case ErrorCode::unprocessable: return "unprocessable";
        case ErrorCode::insufficient_history: return "insufficient_history";
        case ErrorCode::degenerate: return "degenerate";
        case ErrorCode::runtime: return "runtime";
    }
    return "runtime";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::vector<std::string> subjects = {})
        : std::runtime_error(message), code_(code), subjects_(std::move(subjects)) {}

    ErrorCode code() const noexcept { return code_; }
    /// Identifiers the error is about (offending product ids, ...), possibly empty.
    const std::vector<std::string>& subjects() const noexcept { return subjects_; }

private:
    ErrorCode code_;
    std::vector<std::string> subjects_;
};

}  // namespace fcsel
