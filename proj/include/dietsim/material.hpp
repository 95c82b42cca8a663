#pragma once

#include <cstddef>
#include <vector>

#include "dietsim/constants.hpp"

namespace dietsim {

/// One two-level dipole species. Rates are angular rates in 1/s.
struct EmitterSpecies {
    double omega01 = 0.0;     ///< transition angular frequency (rad/s)
    double mu01 = 0.0;        ///< transition dipole moment (C m)
    double Gamma = 0.0;       ///< excited-state decay rate (1/s)
    double gamma_star = 0.0;  ///< pure dephasing rate (1/s)
    double n0 = 0.0;          ///< number density (1/m^3)

    /// Total decoherence rate gamma* + Gamma/2.
    double gamma() const noexcept { return gamma_star + 0.5 * Gamma; }

    /// Lorentz-Lorenz shift n0 mu01^2 / (9 hbar eps0).
    double lorentz_shift() const noexcept {
        return n0 * mu01 * mu01 / (9.0 * phys::hbar * phys::eps0);
    }

    /// sqrt(6 omega01 Delta).
    double plasma_frequency() const noexcept;

    /// Dipole projected on the field axis for an isotropically oriented
    /// ensemble, mu01 / sqrt(3). This is the moment that enters the Rabi
    /// frequency and the macroscopic polarization of the 1D grid; with it
    /// the local-field shift of the simulated medium equals lorentz_shift().
    double coupling_dipole() const noexcept;

    /// Throws InvalidParameter unless omega01, mu01 > 0 and the rates and
    /// density are non-negative and finite.
    void validate() const;

    bool operator==(const EmitterSpecies&) const = default;
};

double total_decoherence(const EmitterSpecies& species) noexcept;

/// Inverse of lorentz_shift(): n0 = 9 hbar eps0 Delta / mu01^2.
double density_from_shift(double delta_target, double mu01);

/// (omega - omega01) / gamma of the reference species.
double reduced_detuning(double omega, const EmitterSpecies& reference);
double omega_from_detuning(double delta, const EmitterSpecies& reference);

/// Transition angular frequency for a vacuum wavelength.
double omega_from_wavelength(double lambda) noexcept;

/// Uniform layer of emitters occupying [z_start, z_start + thickness).
struct SlabMedium {
    double thickness = 0.0;
    double z_start = 0.0;
    std::vector<EmitterSpecies> species;

    void validate() const;

    bool contains(double z) const noexcept { return z >= z_start && z < z_start + thickness; }

    /// Number density of species `index` at position z (zero outside the slab).
    double density_at(std::size_t index, double z) const;

    bool operator==(const SlabMedium&) const = default;
};

}  // namespace dietsim
