#pragma once

#include <stdexcept>
#include <string>

namespace bessim {

/// Base class for every error the library raises.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Graph construction
struct DisconnectedGraph : Error { using Error::Error; };
struct NoAccessUnit : Error { using Error::Error; };
struct SelfLoop : Error { using Error::Error; };

// Linear algebra
struct NotSymmetric : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };

// Battery model
struct NonPositiveCapacity : Error { using Error::Error; };
struct SocOutOfRange : Error { using Error::Error; };

// Observers
struct TimeBeforeStart : Error { using Error::Error; };
struct MissingReference : Error { using Error::Error; };
struct ForbiddenReference : Error { using Error::Error; };

// Power profiles
struct OutOfDomain : Error { using Error::Error; };

// File ingestion
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct MalformedInput : Error { using Error::Error; };

} // namespace bessim
