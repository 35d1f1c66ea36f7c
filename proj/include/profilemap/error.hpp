#pragma once

#include <stdexcept>
#include <string>

namespace profilemap {

// Process exit codes are derived from the kind: config 2, data 3, numeric 4.
enum class ErrorKind { argument, data, consistency };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    const std::string& stage() const noexcept { return stage_; }
    void set_stage(std::string stage) { stage_ = std::move(stage); }

    int exit_code() const noexcept
    {
        switch (kind_) {
        case ErrorKind::argument: return 2;
        case ErrorKind::data: return 3;
        case ErrorKind::consistency: return 4;
        }
        return 1;
    }

private:
    ErrorKind kind_;
    std::string stage_;
};

/// Invalid parameter or violated precondition on caller-supplied arguments.
struct ArgumentError : Error {
    explicit ArgumentError(const std::string& m) : Error(ErrorKind::argument, m) {}
};

/// Malformed or unusable input data.
struct DataError : Error {
    explicit DataError(const std::string& m) : Error(ErrorKind::data, m) {}
};

/// Internal numeric invariant broken (asymmetry, out-of-range cosine, ...).
struct ConsistencyError : Error {
    explicit ConsistencyError(const std::string& m) : Error(ErrorKind::consistency, m) {}
};

} // namespace profilemap
