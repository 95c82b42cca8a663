#include "dietsim/source.hpp"

#include <cmath>
#include <limits>

#include <fftw3.h>

#include "dietsim/constants.hpp"
#include "dietsim/errors.hpp"

namespace dietsim {

namespace {

// Pulses start this many intensity-FWHM before their peak (envelope ~1e-15).
constexpr double pulse_lead = 5.0;

}  // namespace

void SourceSpec::validate() const {
    if (!(carrier > 0.0)) throw InvalidParameter("source: carrier must be positive");
    if (!std::isfinite(peak_e)) throw InvalidParameter("source: peak_e must be finite");
    if (kind == SourceKind::gaussian_pulse && !(fwhm_duration > 0.0))
        throw InvalidParameter("source: pulse fwhm_duration must be positive");
    if (kind == SourceKind::cw_ramp && !(ramp_time > 0.0))
        throw InvalidParameter("source: cw ramp_time must be positive");
}

IncidentWave::IncidentWave(const SourceSpec& spec, double dz, double dt) : spec_(spec) {
    spec_.validate();
    if (spec.kind == SourceKind::gaussian_pulse) {
        sigma_ = spec.fwhm_duration / (2.0 * std::sqrt(std::log(2.0)));
        center_ = pulse_lead * spec.fwhm_duration;
    } else {
        center_ = spec.ramp_time;
    }
    // Numerical wavenumber from sin(omega dt / 2) = S sin(k dz / 2).
    const double courant = phys::c * dt / dz;
    const double k_num = 2.0 / dz * std::asin(std::sin(0.5 * spec.carrier * dt) / courant);
    half_cell_delay_ = 0.5 * k_num * dz / spec.carrier;
    dt_ = dt;
    if (spec.kind == SourceKind::gaussian_pulse) tabulate_pulse(dz);
}

void IncidentWave::tabulate_pulse(double dz) {
    const auto n = static_cast<std::size_t>(std::ceil(end_time() / dt_)) + 1;
    std::size_t m = 1;
    while (m < n + n / 4 + 64) m <<= 1;

    std::vector<double> samples(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) samples[i] = e_at((static_cast<double>(i) + 0.5) * dt_);
    std::vector<fftw_complex> spectrum(m / 2 + 1);
    fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(m), samples.data(), spectrum.data(), FFTW_ESTIMATE);
    fftw_plan inv = fftw_plan_dft_c2r_1d(static_cast<int>(m), spectrum.data(), samples.data(), FFTW_ESTIMATE);
    fftw_execute(fwd);

    // Advance each component by k(w) dz / (2 w); components beyond the grid cutoff are dropped.
    const double courant = phys::c * dt_ / dz;
    for (std::size_t j = 0; j < spectrum.size(); ++j) {
        const double w = 2.0 * pi * static_cast<double>(j) / (static_cast<double>(m) * dt_);
        const double arg = std::sin(0.5 * w * dt_) / courant;
        std::complex<double> factor = 1.0;
        if (j > 0) factor = arg < 1.0 ? std::polar(1.0, std::asin(arg)) : 0.0;
        const std::complex<double> v = std::complex<double>(spectrum[j][0], spectrum[j][1]) * factor / static_cast<double>(m);
        spectrum[j][0] = v.real();
        spectrum[j][1] = v.imag();
    }
    fftw_execute(inv);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    samples.resize(n);
    h_table_ = std::move(samples);
}

double IncidentWave::e_at(double t) const noexcept {
    if (spec_.kind == SourceKind::gaussian_pulse) {
        const double u = t - center_;
        return spec_.peak_e * std::exp(-0.5 * u * u / (sigma_ * sigma_)) * std::cos(spec_.carrier * u);
    }
    if (t <= 0.0) return 0.0;
    double ramp = 1.0;
    if (t < spec_.ramp_time) {
        const double s = std::sin(0.5 * pi * t / spec_.ramp_time);
        ramp = s * s;
    }
    return spec_.peak_e * ramp * std::sin(spec_.carrier * t);
}

double IncidentWave::h_upstream(double t) const noexcept {
    if (!h_table_.empty()) {
        const double u = t / dt_ - 0.5;
        const double idx = std::round(u);
        if (std::abs(u - idx) < 1e-6) {
            if (idx < 0.0 || idx >= static_cast<double>(h_table_.size())) return 0.0;
            return h_table_[static_cast<std::size_t>(idx)] / phys::eta0;
        }
    }
    return e_at(t + half_cell_delay_) / phys::eta0;
}

double IncidentWave::end_time() const noexcept {
    return spec_.kind == SourceKind::gaussian_pulse ? center_ + pulse_lead * spec_.fwhm_duration
                                                    : std::numeric_limits<double>::infinity();
}

std::complex<double> IncidentWave::analytic_spectrum(double omega) const {
    if (spec_.kind != SourceKind::gaussian_pulse)
        throw InvalidParameter("analytic_spectrum: only defined for pulses");
    const double s2 = sigma_ * sigma_;
    const double amplitude = 0.5 * spec_.peak_e * sigma_ * std::sqrt(2.0 * pi);
    const double lobes = std::exp(-0.5 * s2 * (omega - spec_.carrier) * (omega - spec_.carrier))
                         + std::exp(-0.5 * s2 * (omega + spec_.carrier) * (omega + spec_.carrier));
    return amplitude * lobes * std::polar(1.0, -omega * center_);
}

}  // namespace dietsim
