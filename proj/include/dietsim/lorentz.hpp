#pragma once

// Closed-form extended Lorentz model of a dense slab with local-field
// correction, for one or two dipole species.
//
// Sign convention: fields vary as exp(-i omega t), so a passive medium has
// Im[chi] >= 0 and Im[n] >= 0. The polarization obeys
//   P'' + 2 gamma P' + omega01^2 P = eps0 omega_p^2 (E + P_total / (3 eps0)),
// i.e. the oscillator amplitude decays at the Bloch coherence rate gamma and
// the dilute line has half-width gamma.

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "dietsim/material.hpp"
#include "dietsim/spectrum.hpp"

namespace dietsim {

using cplx = std::complex<double>;

struct Susceptibility {
    double omega = 0.0;
    cplx value;
};

struct OpticalResponse {
    double omega = 0.0;
    cplx n_complex;
    double reflectance = 0.0;  ///< semi-infinite interface reflectance
    double group_index = 0.0;  ///< NaN where the derivative is unreliable
};

struct FrequencyWindow {
    double low = 0.0;
    double high = 0.0;
    double width() const noexcept { return high - low; }
};

/// chi = 6 omega01 / f(omega), f = (omega01^2 - 2 omega01 Delta - omega^2 - 2 i gamma omega) / Delta.
cplx chi_single(double omega, const EmitterSpecies& s);

/// Two mutually coupled species sharing one local field.
cplx chi_mixture(double omega, const EmitterSpecies& s, const EmitterSpecies& s2);

/// Dispatches on the species count of the medium.
cplx chi_medium(double omega, const SlabMedium& medium);

/// sqrt(1 + chi) on the branch with Im[n] >= 0.
cplx refractive_index(cplx chi);

/// Transparency frequency in the gamma << Delta limit:
/// w*^2 = (w01 D w01'^2 + w01' D' w01^2) / (w01 D + w01' D').
double transparency_frequency(const EmitterSpecies& s, const EmitterSpecies& s2);

/// Location of the minimum of |chi_mixture| between the two transition
/// frequencies (coarse scan followed by golden-section refinement).
double transparency_frequency_numeric(const EmitterSpecies& s, const EmitterSpecies& s2);

/// Exact gamma = 0 edges of the total-reflection band: the pole
/// sqrt(w01^2 - 2 w01 D) and the chi = -1 crossing sqrt(w01^2 + 4 w01 D).
FrequencyWindow reflection_window(const EmitterSpecies& s);

/// |(1 - n) / (1 + n)|^2 for a real index.
double interface_reflectance(double n);
/// Same with n = Re[sqrt(1 + chi_single(omega))].
double interface_reflectance(double omega, const EmitterSpecies& s);

/// Complex amplitude coefficients of a homogeneous slab between vacuum
/// half-spaces (Airy summation).
struct SlabCoefficients {
    cplx t;
    cplx r;
};
SlabCoefficients slab_coefficients(double omega, cplx n, double thickness);

/// T, R and 1 - T - R on the given strictly increasing grid.
SpectrumResult slab_spectra(std::span<const double> omega_grid, const SlabMedium& medium);

/// Real frequencies of the gamma = 0 poles of chi for the medium.
std::vector<double> resonance_poles(const SlabMedium& medium);

/// n + omega dn/domega with dn/domega from an adaptive central difference
/// (initial step gamma/100, halved until consecutive estimates agree to 1e-6).
double group_index(double omega, const SlabMedium& medium);

/// Weighted mean of group_index over a frequency grid. Points where the
/// derivative is unreliable are skipped; throws DerivativeUnreliable if they
/// carry more than 1% of the weight.
double band_averaged_group_index(std::span<const double> omega, std::span<const double> weight,
                                 const SlabMedium& medium);

OpticalResponse optical_response(double omega, const SlabMedium& medium);

}  // namespace dietsim
