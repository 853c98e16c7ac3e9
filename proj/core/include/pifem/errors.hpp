#pragma once

#include <stdexcept>
#include <string>

namespace pifem {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// mesh
struct CurveTouchesBoundary : Error { using Error::Error; };
struct DegenerateMesh : Error { using Error::Error; };
struct PointOutsideDomain : Error { using Error::Error; };

// sparse
struct IndexOutOfRange : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct NotSymmetric : Error { using Error::Error; };
struct NotConverged : Error { using Error::Error; };

// operators
struct MissingGradient : Error { using Error::Error; };

// measure
struct AtomOutsideInterval : Error { using Error::Error; };
struct BadInterval : Error { using Error::Error; };

// solver / analysis
struct GridMismatch : Error { using Error::Error; };

// cli
struct ConfigError : Error { using Error::Error; };

}  // namespace pifem
