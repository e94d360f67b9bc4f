#pragma once

#include <stdexcept>
#include <string>

namespace irfad {

enum class ErrorKind {
    parameter,
    shape,
    numeric,
    contract,
    undefined_metric,
    training_diverged,
    checkpoint_version,
    checkpoint_schedule,
    checkpoint_corrupt,
    data,
    config,
    io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base for every error the library raises. The kind is stable and is what
/// the CLI maps to exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), m_kind(kind) {}

    ErrorKind kind() const noexcept { return m_kind; }

private:
    ErrorKind m_kind;
};

class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& m) : Error(ErrorKind::parameter, m) {}
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& m) : Error(ErrorKind::shape, m) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& m) : Error(ErrorKind::numeric, m) {}
};

class ContractError : public Error {
public:
    explicit ContractError(const std::string& m) : Error(ErrorKind::contract, m) {}
};

class UndefinedMetricError : public Error {
public:
    explicit UndefinedMetricError(const std::string& m) : Error(ErrorKind::undefined_metric, m) {}
};

class TrainingDivergedError : public Error {
public:
    TrainingDivergedError(int epoch, const std::string& m)
        : Error(ErrorKind::training_diverged, m), m_epoch(epoch) {}
    int epoch() const noexcept { return m_epoch; }

private:
    int m_epoch;
};

class CheckpointError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    explicit DataError(const std::string& m) : Error(ErrorKind::data, m) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& m) : Error(ErrorKind::config, m) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& m) : Error(ErrorKind::io, m) {}
};

} // namespace irfad
