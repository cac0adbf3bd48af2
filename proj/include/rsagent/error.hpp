#pragma once

#include <stdexcept>
#include <string>

namespace rsagent {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller handed in a value that violates an operation's precondition.
class InputError : public Error {
public:
    using Error::Error;
};

/// Invalid or conflicting configuration (duplicate registrations, bad keys).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Transport-level failure talking to a remote backend. Retriable.
class NetworkError : public Error {
public:
    NetworkError(const std::string& what, int attempts)
        : Error(what + " (after " + std::to_string(attempts) + " attempt" +
                (attempts == 1 ? "" : "s") + ")"),
          attempts_(attempts)
    {}

    int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

/// A remote backend answered, but the reply did not follow the wire schema.
class ProtocolError : public Error {
public:
    ProtocolError(const std::string& what, std::string raw_body)
        : Error(what), raw_body_(std::move(raw_body))
    {}

    const std::string& raw_body() const noexcept { return raw_body_; }

private:
    std::string raw_body_;
};

/// The scripted mock backend has no rule for the prompt it was given.
class ScriptMissError : public Error {
public:
    explicit ScriptMissError(std::string digest)
        : Error("no scripted reply for prompt digest " + digest),
          digest_(std::move(digest))
    {}

    const std::string& digest() const noexcept { return digest_; }

private:
    std::string digest_;
};

class EmptyIndexError : public Error {
public:
    EmptyIndexError() : Error("index is empty") {}
    using Error::Error;
};

class IngestError : public Error {
public:
    using Error::Error;
};

class ToolNotFoundError : public Error {
public:
    explicit ToolNotFoundError(const std::string& name)
        : Error("unknown tool: " + name), name_(name)
    {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// A tool executor failed. `detail` carries the executor's stderr or body.
class ToolExecutionError : public Error {
public:
    ToolExecutionError(std::string tool, const std::string& what, std::string detail = {})
        : Error(tool + ": " + what), tool_(std::move(tool)), detail_(std::move(detail))
    {}

    const std::string& tool() const noexcept { return tool_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string tool_;
    std::string detail_;
};

} // namespace rsagent
