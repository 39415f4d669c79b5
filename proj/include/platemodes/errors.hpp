#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace platemodes {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error { using Error::Error; };
struct SingularEvaluation : Error { using Error::Error; };
struct InvalidSpec : Error { using Error::Error; };
struct RangeError : Error { using Error::Error; };
struct BracketError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct BoundaryProximity : Error { using Error::Error; };
struct NotAnEigenvalue : Error { using Error::Error; };

// The Nystrom matrix is (numerically) singular: lambda sits on an
// unclamped eigenvalue or a representation resonance.
struct NearSingularSystem : Error {
    NearSingularSystem(const std::string& what, double rcond)
        : Error(what), rcond(rcond) {}
    double rcond;
};

struct DegenerateConfiguration : Error {
    DegenerateConfiguration(const std::string& what, int collapsed_index)
        : Error(what), collapsed_index(collapsed_index) {}
    int collapsed_index;  // clamp whose strength went to zero, -1 if unknown
};

// Newton ran out of iterations; carries the best iterate seen.
struct NonConvergence : Error {
    NonConvergence(const std::string& what, std::vector<double> alpha, double lambda, double residual)
        : Error(what), alpha(std::move(alpha)), lambda(lambda), residual(residual) {}
    std::vector<double> alpha;
    double lambda;
    double residual;
};

}  // namespace platemodes
