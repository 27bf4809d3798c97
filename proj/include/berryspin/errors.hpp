#pragma once

#include <stdexcept>
#include <string>

namespace berryspin {

/// Bad input: out-of-domain parameters, malformed configuration, wrong
/// dimensions. The CLI maps these to exit code 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not deliver a trustworthy result.
/// The CLI maps these to exit code 2.
class ComputationError : public std::runtime_error {
public:
    ComputationError(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    /// Short machine-readable tag ("gauge", "adiabaticity", ...).
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class ConvergenceError : public ComputationError {
public:
    explicit ConvergenceError(const std::string& what) : ComputationError("convergence", what) {}
};

/// Overlap between neighbouring states fell below the degeneracy threshold.
class GaugeTrackingError : public ComputationError {
public:
    explicit GaugeTrackingError(const std::string& what) : ComputationError("gauge", what) {}
};

class AdiabaticityError : public ComputationError {
public:
    explicit AdiabaticityError(const std::string& what) : ComputationError("adiabaticity", what) {}
};

/// Reduced spectrum too close to 1/2 for a well-defined eigenbasis.
class DegenerateSpectrumError : public ComputationError {
public:
    explicit DegenerateSpectrumError(const std::string& what) : ComputationError("degenerate", what) {}
};

class ConsistencyError : public ComputationError {
public:
    explicit ConsistencyError(const std::string& what) : ComputationError("consistency", what) {}
};

class StepSizeError : public ComputationError {
public:
    explicit StepSizeError(const std::string& what) : ComputationError("step_size", what) {}
};

}  // namespace berryspin
