#pragma once

#include <stdexcept>
#include <string>

namespace duflo {

/// A degree or truncation bound was too small for the requested computation.
/// The message names the bound to raise.
struct bound_error : std::runtime_error {
    explicit bound_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input data (dimension mismatches, bad tables, missing fields).
struct structural_error : std::runtime_error {
    explicit structural_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// An operation's documented precondition was violated by the caller.
struct precondition_error : std::runtime_error {
    explicit precondition_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Unparseable textual input.
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Unknown name in a catalog lookup.
struct lookup_error : std::runtime_error {
    explicit lookup_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace duflo
