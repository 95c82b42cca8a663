#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dietsim {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- configuration / parameter errors (CLI exit code 2) -------------------

class ConfigError : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Reduced detuning requested against a reference with zero linewidth.
class DegenerateDetuning : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Density so high that the shifted resonance omega01^2 - 2 omega01 Delta <= 0.
class DegenerateMedium : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// ---- numerical failures during time stepping (exit code 3) ----------------

class NumericalError : public Error {
public:
    using Error::Error;
};

class IntegratorInstability : public NumericalError {
public:
    IntegratorInstability(std::size_t cell, std::uint64_t step, const std::string& what)
        : NumericalError("density matrix invariant violated at cell " + std::to_string(cell)
                         + ", step " + std::to_string(step) + ": " + what),
          cell_(cell), step_(step) {}

    std::size_t cell() const noexcept { return cell_; }
    std::uint64_t step() const noexcept { return step_; }

private:
    std::size_t cell_;
    std::uint64_t step_;
};

class SimulationDiverged : public NumericalError {
public:
    explicit SimulationDiverged(std::uint64_t step)
        : NumericalError("non-finite field detected at step " + std::to_string(step)), step_(step) {}

    std::uint64_t step() const noexcept { return step_; }

private:
    std::uint64_t step_;
};

// ---- post-processing failures (exit code 4) -------------------------------

class AnalysisError : public Error {
public:
    using Error::Error;
};

class TruncatedRecording : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

class BandMismatch : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

class FitFailed : public AnalysisError {
public:
    FitFailed(const std::string& what, double residual)
        : AnalysisError(what + " (residual rms " + std::to_string(residual) + ")"), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class NoTransparency : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

class OpaqueMedium : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

class DerivativeUnreliable : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

}  // namespace dietsim
