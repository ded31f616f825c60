#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace hbc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument is outside the documented domain (non-positive value, bad fraction, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A netlist violates a structural invariant (duplicate node, missing source, ...).
class TopologyError : public Error {
public:
    using Error::Error;
};

/// The nodal system has no unique solution. `node()` names the node that
/// could not be determined.
class SingularCircuitError : public Error {
public:
    SingularCircuitError(std::string node, const std::string& what)
        : Error(what), node_(std::move(node)) {}

    const std::string& node() const noexcept { return node_; }

private:
    std::string node_;
};

/// A channel configuration combines a ground regime and modality the model does not support.
class InvalidConfigError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    enum class Reason { insufficient_data, no_positive_solution, negative_estimate };

    FitError(Reason reason, const std::string& what) : Error(what), reason_(reason) {}

    Reason reason() const noexcept { return reason_; }

private:
    Reason reason_;
};

class EstimationError : public Error {
public:
    enum class Reason { no_transitions, all_noise, no_settling };

    EstimationError(Reason reason, const std::string& what) : Error(what), reason_(reason) {}

    Reason reason() const noexcept { return reason_; }

private:
    Reason reason_;
};

/// De-embedding would divide by a receive-chain response below the threshold.
class DeembedError : public Error {
public:
    using Error::Error;
};

/// Malformed text input (config or CSV). `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(std::string source, std::size_t line, std::string key, const std::string& message)
        : Error(format(source, line, key, message)),
          source_(std::move(source)),
          line_(line),
          key_(std::move(key)) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    static std::string format(const std::string& source, std::size_t line, const std::string& key,
                              const std::string& message) {
        std::string out = source.empty() ? std::string("<input>") : source;
        if (line > 0) out += ":" + std::to_string(line);
        out += ": ";
        if (!key.empty()) out += "key '" + key + "': ";
        return out + message;
    }

    std::string source_;
    std::size_t line_;
    std::string key_;
};

}  // namespace hbc
