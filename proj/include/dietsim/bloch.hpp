#pragma once

// Two-level optical Bloch equations in the laboratory frame (no rotating-wave
// approximation), driven by the local field and damped by Lindblad decay
// Gamma on |1> and total coherence damping gamma = gamma* + Gamma/2.
//
// Convention: rho01 = <0|rho|1>, interaction V = -mu E_local (|0><1| + |1><0|),
// rabi = mu E_local / hbar. Then
//   d rho11/dt  = -2 rabi Im[rho01] - Gamma rho11
//   d rho00/dt  = -d rho11/dt
//   d rho01/dt  = i omega01 rho01 + i rabi (rho11 - rho00) - gamma rho01
// and the dipole expectation is 2 mu Re[rho01].

#include <cstdint>
#include <span>
#include <vector>

#include "dietsim/kernels.hpp"
#include "dietsim/material.hpp"

namespace dietsim {

struct DensityMatrixState {
    double rho00 = 1.0;
    double rho11 = 0.0;
    double rho01_re = 0.0;
    double rho01_im = 0.0;
};

inline constexpr double trace_tolerance = 1e-9;
inline constexpr double positivity_tolerance = 1e-9;

/// Time derivative of each component (returned in a DensityMatrixState).
DensityMatrixState bloch_derivative(const DensityMatrixState& state, double rabi, const EmitterSpecies& s);

/// E_x + P_total / (3 eps0). In a mixture P_total is the sum over species.
double local_field(double e_macroscopic, double p_total) noexcept;

/// projected dipole * E_local / hbar.
double rabi_frequency(double e_local, const EmitterSpecies& s) noexcept;

kernels::BlochRates bloch_rates(const EmitterSpecies& s) noexcept;

/// One RK4 step of a single cell. Requires omega01 * dt <= 0.2; throws
/// IntegratorInstability (tagged with cell and step) if the result breaks
/// trace preservation or positivity beyond tolerance.
DensityMatrixState advance_cell(const DensityMatrixState& state, const EmitterSpecies& s, double e_local_begin,
                                double e_local_mid, double e_local_end, double dt, std::size_t cell = 0,
                                std::uint64_t step = 0);

/// Throws IntegratorInstability when a kernel check exceeds tolerance.
void enforce_invariants(const kernels::BlochCheck& check, std::size_t cell, std::uint64_t step);
void check_invariants(const DensityMatrixState& state, std::size_t cell, std::uint64_t step);

/// 2 n0 mu_projected Re[rho01].
double species_polarization(const DensityMatrixState& state, const EmitterSpecies& s) noexcept;

struct CellPolarization {
    double total = 0.0;
    std::vector<double> partial;
};

CellPolarization polarization_of_cell(std::span<const DensityMatrixState> states,
                                      std::span<const EmitterSpecies> species);

}  // namespace dietsim
