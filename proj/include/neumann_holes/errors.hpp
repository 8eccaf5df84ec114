#pragma once

#include <stdexcept>
#include <string>

namespace nh {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GeometryError : Error { using Error::Error; };
struct MeshError : Error { using Error::Error; };
struct NoHoleError : Error { using Error::Error; };
struct ConvergenceError : Error { using Error::Error; };
struct FactorizationError : Error { using Error::Error; };
struct AmbiguousSignError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct OdeError : Error { using Error::Error; };
struct ZeroVectorError : Error { using Error::Error; };
struct RootBracketError : Error { using Error::Error; };
struct HypothesisError : Error { using Error::Error; };
struct SimplicityError : Error { using Error::Error; };
struct OrderTooHighError : Error { using Error::Error; };
struct UnfittableError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

} // namespace nh
