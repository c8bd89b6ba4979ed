#pragma once

#include <stdexcept>
#include <string>

namespace sciprep {

// Error categories map 1:1 onto CLI exit codes: config -> 1, data -> 2,
// backend -> 3.
enum class ErrorCategory { config, data, backend };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string message)
        : std::runtime_error(std::move(message)), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::string message)
        : Error(ErrorCategory::config, std::move(message)) {}
};

class DataError : public Error {
public:
    explicit DataError(std::string message)
        : Error(ErrorCategory::data, std::move(message)) {}
};

// Transient backend errors are retried by the gateway; permanent ones are not.
class BackendError : public Error {
public:
    explicit BackendError(std::string message, bool transient = false)
        : Error(ErrorCategory::backend, std::move(message)), transient_(transient) {}

    bool transient() const noexcept { return transient_; }

private:
    bool transient_;
};

} // namespace sciprep
