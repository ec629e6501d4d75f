#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace privwalk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Graph construction or validation failed (disconnected, bad id, ...).
class GraphError : public Error {
public:
    using Error::Error;
};

/// A query hit a node that does not publish its neighbors.
class PrivateNodeError : public Error {
public:
    explicit PrivateNodeError(std::uint64_t node)
        : Error("node " + std::to_string(node) + " is private"), node_(node) {}
    std::uint64_t node() const noexcept { return node_; }

private:
    std::uint64_t node_;
};

/// The walk cannot make progress (seed without public neighbors).
class StuckWalkError : public Error {
public:
    using Error::Error;
};

/// No sample pair at gap >= m collided, so the size estimate is undefined.
class NoCollisionError : public Error {
public:
    using Error::Error;
};

/// Estimator input cannot be evaluated (zero weight denominators, bad m).
class EstimationError : public Error {
public:
    using Error::Error;
};

/// Malformed input file; carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace privwalk
