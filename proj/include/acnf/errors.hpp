#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace acnf {

/// Invalid search space (empty dimension, duplicate names, overflow).
class SpaceError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A SearchConfig field outside its allowed range.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file. `line()` is 1-based, 0 when not line-specific.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string source, std::size_t line, const std::string& what)
        : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string{}) + ": " + what),
          source_(std::move(source)), line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

/// Every combination is excluded; nothing left to sample.
class SearchExhausted : public std::runtime_error {
public:
    SearchExhausted() : std::runtime_error("search exhausted: every combination is excluded") {}
};

/// No ok-status record to pick a best from.
class NoResult : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Spawn or handshake failure of an external evaluator.
class SetupError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The search loop stopped because the evaluator broke its contract.
class SearchAborted : public std::runtime_error {
public:
    SearchAborted(std::size_t iteration, std::string combination, const std::string& why)
        : std::runtime_error("search aborted at iteration " + std::to_string(iteration) + " on " +
                             combination + ": " + why),
          iteration_(iteration), combination_(std::move(combination)) {}

    std::size_t iteration() const noexcept { return iteration_; }
    const std::string& combination() const noexcept { return combination_; }

private:
    std::size_t iteration_;
    std::string combination_;
};

/// Run-state file could not be restored.
class LoadError : public std::runtime_error {
public:
    enum class Kind { io, version_mismatch, corrupt };

    LoadError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

} // namespace acnf
