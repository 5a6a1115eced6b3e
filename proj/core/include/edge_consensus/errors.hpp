#pragma once

#include <stdexcept>
#include <string>

namespace edge_consensus {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised while constructing or validating domain objects from user input.
struct InputError : Error {
    using Error::Error;
};

/// Raised by controller design and the algebra feeding it.
struct SynthesisError : Error {
    using Error::Error;
};

/// Raised by the numerical integration layer.
struct SimulationError : Error {
    using Error::Error;
};

struct DisconnectedGraph : SynthesisError {
    using SynthesisError::SynthesisError;
};

struct NotStabilizable : SynthesisError {
    using SynthesisError::SynthesisError;
};

struct NotDetectable : SynthesisError {
    using SynthesisError::SynthesisError;
};

struct ConvergenceFailure : SynthesisError {
    ConvergenceFailure(const std::string& what, double residual)
        : SynthesisError(what), residual(residual) {}
    double residual;
};

struct CouplingTooSmall : SynthesisError {
    using SynthesisError::SynthesisError;
};

struct AssumptionViolation : SynthesisError {
    using SynthesisError::SynthesisError;
};

struct RepeatedTargetMode : SynthesisError {
    using SynthesisError::SynthesisError;
};

struct ComplexGainResidual : SynthesisError {
    using SynthesisError::SynthesisError;
};

struct ZeroNotSimple : SynthesisError {
    using SynthesisError::SynthesisError;
};

struct UncontrollableZeroMode : SynthesisError {
    using SynthesisError::SynthesisError;
};

struct StepTooLarge : SimulationError {
    using SimulationError::SimulationError;
};

struct HorizonTooShort : SimulationError {
    using SimulationError::SimulationError;
};

}  // namespace edge_consensus
