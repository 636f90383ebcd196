#pragma once

#include <stdexcept>
#include <string>

namespace spacs {

struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OrthogonalPostselection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PostselectionFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedPhase : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivergentPhaseVariance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateSignal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateInversion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FlatLikelihood : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace spacs
