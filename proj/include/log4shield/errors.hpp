#pragma once

#include <stdexcept>
#include <string>

namespace log4shield {

/// Base class for all errors raised by the library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when the knowledge-base file fails to parse or validate.
/// Carries the offending line so callers can print "file:line: message".
class kb_error : public error {
public:
    kb_error(std::string file, int line, const std::string& message)
        : error(file.empty() ? format_bare(line, message) : file + ":" + std::to_string(line) + ": " + message),
          file_(std::move(file)),
          line_(line) {}

    const std::string& file() const noexcept { return file_; }
    int line() const noexcept { return line_; }

private:
    static std::string format_bare(int line, const std::string& message) {
        return "line " + std::to_string(line) + ": " + message;
    }

    std::string file_;
    int line_;
};

/// Raised for unrecoverable scan-level failures (missing root, unreadable manifest).
class scan_error : public error {
public:
    using error::error;
};

} // namespace log4shield
