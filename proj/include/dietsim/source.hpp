#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace dietsim {

enum class SourceKind { gaussian_pulse, cw_ramp };

struct SourceSpec {
    SourceKind kind = SourceKind::gaussian_pulse;
    double carrier = 0.0;        ///< angular carrier frequency (rad/s)
    double fwhm_duration = 0.0;  ///< intensity FWHM of a pulse (s)
    double ramp_time = 0.0;      ///< sin^2 turn-on time of a CW drive (s)
    double peak_e = 0.0;         ///< peak incident field (V/m)
    std::size_t injection_cell = 0;

    void validate() const;

    bool operator==(const SourceSpec&) const = default;
};

/// Rightward plane wave entering the total-field region at the injection
/// node. The magnetic field half a cell upstream is the electric waveform
/// advanced by the discrete half-cell transit time, so the injected wave obeys
/// the grid's own dispersion relation. Pulses apply that delay per frequency
/// (tabulated at the half steps); CW drives apply it at the carrier.
class IncidentWave {
public:
    IncidentWave(const SourceSpec& spec, double dz, double dt);

    /// E_inc at the injection node.
    double e_at(double t) const noexcept;
    /// H_inc at injection node - 1/2. Exact on the grid's half steps.
    double h_upstream(double t) const noexcept;

    /// Pulse peak time; for CW drives the end of the ramp.
    double center_time() const noexcept { return center_; }
    /// Time after which a pulse has vanished (envelope below 1e-15).
    double end_time() const noexcept;

    /// Continuous Fourier transform int e(t) exp(-i omega t) dt of a pulse.
    std::complex<double> analytic_spectrum(double omega) const;

    const SourceSpec& spec() const noexcept { return spec_; }
    double half_cell_delay() const noexcept { return half_cell_delay_; }

private:
    SourceSpec spec_;
    double sigma_ = 0.0;
    double center_ = 0.0;
    double half_cell_delay_ = 0.0;
    double dt_ = 0.0;
    std::vector<double> h_table_;  ///< eta0 * H_inc at (m + 1/2) dt

    void tabulate_pulse(double dz);
};

}  // namespace dietsim
