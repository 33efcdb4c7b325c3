#pragma once

#include <stdexcept>
#include <string>

namespace fminlab {

// Base for all library failures; the CLI maps subclasses onto exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ArgumentError : Error { using Error::Error; };
struct SingularityError : Error { using Error::Error; };
struct GeometryError : Error { using Error::Error; };
struct CapabilityError : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };
struct NumericError : Error { using Error::Error; };
struct IntegrationError : NumericError { using NumericError::NumericError; };
struct IncompleteSpectrumError : NumericError { using NumericError::NumericError; };

} // namespace fminlab
