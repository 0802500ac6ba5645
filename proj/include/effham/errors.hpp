#ifndef EFFHAM_ERRORS_HPP
#define EFFHAM_ERRORS_HPP

#include <stdexcept>

namespace effham {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input violates the hermiticity tolerance.
struct NotHermitian : Error { using Error::Error; };

/// Eigensolver sweep cap exceeded.
struct NoConvergence : Error { using Error::Error; };

/// An irrelevant-sector block is numerically singular. Usually means a
/// resonant state was misclassified as irrelevant.
struct SingularBlock : Error { using Error::Error; };

struct NotPositiveDefinite : Error { using Error::Error; };

/// Adjacent ladder levels are degenerate; the photon sign is undefined.
struct DegenerateAdjacentLevels : Error { using Error::Error; };

/// Malformed index set, partition plan, or shape mismatch.
struct IndexError : Error { using Error::Error; };

/// Requested approximation order is not part of the implemented hierarchy.
struct UnsupportedOrder : Error { using Error::Error; };

struct InitialStateOutsideRelevant : Error { using Error::Error; };

struct GridTooCoarse : Error { using Error::Error; };

struct GridMismatch : Error { using Error::Error; };

/// Norm minimization had no valid sample point.
struct SearchFailed : Error { using Error::Error; };

/// Non-finite or out-of-range numeric input.
struct InvalidValue : Error { using Error::Error; };

/// Problem with a run configuration (CLI layer).
struct ConfigError : Error { using Error::Error; };

}  // namespace effham

#endif  // EFFHAM_ERRORS_HPP
