#pragma once

#include <stdexcept>
#include <string>

namespace quadrank {

/// An operation was called outside its documented preconditions.
struct precondition_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The input is mathematically outside the domain (zero where a unit is
/// required, a pole of a map, ...).
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

/// The input is valid but beyond what the implementation promises to handle.
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or conflicting command-line / configuration input.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw precondition_error(what);
}

}  // namespace quadrank
