#pragma once

#include <stdexcept>
#include <string>

namespace weyllab {

// Base class for everything the library throws on a contract violation or a
// numerical failure that the caller can act on.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonIntegrable : Error { using Error::Error; };
struct QuadratureFailure : Error { using Error::Error; };
struct GammaRangeError : Error { using Error::Error; };
struct EmptyMeasure : Error { using Error::Error; };
struct EmptyHead : Error { using Error::Error; };
struct InvalidParameters : Error { using Error::Error; };
struct DegenerateAcceptance : Error { using Error::Error; };
struct GridTooCoarse : Error { using Error::Error; };
struct ConvergenceFailure : Error { using Error::Error; };
struct TrustWindowEmpty : Error { using Error::Error; };
struct UntrustedRange : Error { using Error::Error; };
struct TailNotCertified : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace weyllab
