#pragma once

#include <stdexcept>
#include <string>

namespace marketdiag {

// Error categories map onto CLI exit codes: config=1, data=2, numeric=3.
enum class ErrorKind { Config, Data, Numeric };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string msg)
        : std::runtime_error(std::move(msg)), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::string msg) : Error(ErrorKind::Config, std::move(msg)) {}
};

class DataError : public Error {
public:
    explicit DataError(std::string msg) : Error(ErrorKind::Data, std::move(msg)) {}
};

class NumericError : public Error {
public:
    explicit NumericError(std::string msg) : Error(ErrorKind::Numeric, std::move(msg)) {}
};

}  // namespace marketdiag
