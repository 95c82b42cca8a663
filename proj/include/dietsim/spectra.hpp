#pragma once

// Frequency-domain post-processing of probe recordings.
//
// Fourier convention: X(omega) = sum_n x(t_n) exp(-i omega t_n) dt_sample,
// matching the exp(-i omega t) convention of the analytic model.

#include <array>
#include <complex>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dietsim/material.hpp"
#include "dietsim/probe.hpp"
#include "dietsim/spectrum.hpp"

namespace dietsim {

struct SpectralOptions {
    double omega_lo = 0.0;     ///< analysis band (rad/s)
    double omega_hi = 0.0;
    double resolution = 0.0;   ///< largest acceptable bin spacing (rad/s)
    std::size_t pad_factor = 4;
    double band_threshold = 1e-4;  ///< incident power relative to its peak
};

struct ComplexSpectrum {
    std::vector<double> omega;
    std::vector<std::complex<double>> e;
    std::vector<std::complex<double>> h;  ///< phase-corrected to the E sample times
    std::size_t padded_length = 0;
};

/// Zero-padded DFT of both probe fields, restricted to the analysis band.
/// Throws TruncatedRecording if the trailing 5% of samples carry 1e-6 or more
/// of the total field energy, and AnalysisError if sampling is too coarse
/// for omega_hi.
ComplexSpectrum power_spectrum(const ProbeRecording& recording, const SpectralOptions& options);

/// Re[E H*] / 2 per bin.
std::vector<double> poynting_flux(const ComplexSpectrum& spectrum);

struct RunProbes {
    ProbeRecording reflected;    ///< scattered-field side
    ProbeRecording transmitted;
};

/// T = S_t / S_inc, R = -S_r / S_inc with S_inc the vacuum flux at the
/// transmission probe; band_mask where S_inc >= threshold * max S_inc.
/// Throws BandMismatch if the recordings disagree in shape or the mask is
/// empty.
SpectrumResult transmission_reflection(const RunProbes& main_run, const RunProbes& vacuum_run,
                                       const EmitterSpecies& reference, const SpectralOptions& options);

/// Same from precomputed flux spectra on a shared axis.
SpectrumResult spectrum_from_flux(std::span<const double> omega, std::span<const double> incident,
                                  std::span<const double> transmitted, std::span<const double> reflected,
                                  const EmitterSpecies& reference, double band_threshold = 1e-4);

struct LorentzFit {
    double center = 0.0;
    double half_width = 0.0;
    double amplitude = 0.0;
    double baseline = 0.0;
    std::array<double, 16> covariance{};  ///< row-major, order as above
    double residual_rms = 0.0;
    int iterations = 0;
    bool poor_fit = false;  ///< residual above 3% of the amplitude
};

/// Levenberg-Marquardt fit of a w^2 / ((x - x0)^2 + w^2) + b. Throws
/// FitFailed when the iteration does not converge.
LorentzFit fit_lorentzian(std::span<const double> x, std::span<const double> y, int max_iterations = 200);

struct Transparency {
    double omega = 0.0;
    double delta = 0.0;
    double fwhm = 0.0;  ///< rad/s; NaN if a half-maximum crossing lies outside the band
    double peak = 0.0;
    double prominence = 0.0;
};

/// Most prominent interior local maximum of T on the band mask, searched
/// strictly between omega_lo and omega_hi. Throws NoTransparency if no peak
/// rises min_prominence above the lower of its two flanking minima.
Transparency find_transparency(const SpectrumResult& spectrum, double omega_lo, double omega_hi,
                               double min_prominence = 0.05);

/// All interior local maxima of y (indices), ignoring plateaus.
std::vector<std::size_t> local_maxima(std::span<const double> y);

/// Height of y[i] above the higher of the two minima reached before y
/// climbs above y[i] on either side.
double peak_prominence(std::span<const double> y, std::size_t i);

/// Interior local maxima whose prominence is at least min_prominence.
std::vector<std::size_t> prominent_maxima(std::span<const double> y, double min_prominence);

/// Linearly interpolated x positions where y crosses level.
std::vector<double> level_crossings(std::span<const double> x, std::span<const double> y, double level);

/// Energy-centroid time of E H along the recording.
double flux_centroid(const ProbeRecording& recording);

/// Centroid of the transmitted flux minus that of the vacuum run. Throws
/// OpaqueMedium if the transmitted energy is below 1e-6 of the vacuum one.
double group_delay(const ProbeRecording& main_transmitted, const ProbeRecording& vacuum_transmitted);

using Metadata = std::map<std::string, std::string>;

/// Flat `key=value` lines, sorted by key.
void write_metadata(const Metadata& meta, const std::filesystem::path& path);
Metadata read_metadata(const std::filesystem::path& path);

}  // namespace dietsim
