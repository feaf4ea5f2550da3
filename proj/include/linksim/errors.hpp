#pragma once

#include <stdexcept>
#include <string>

namespace linksim {

// Base class for all library errors so callers can catch one type at the CLI
// boundary.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonDivisibleLength : Error { using Error::Error; };
struct UnsupportedOrder : Error { using Error::Error; };
struct InvalidNoise : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct NotNormalized : Error { using Error::Error; };
struct StaleCache : Error { using Error::Error; };
struct StaleCalibration : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct ConfigInvalid : Error { using Error::Error; };
struct ModelLoadError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct FormatVersionMismatch : Error { using Error::Error; };

}  // namespace linksim
