#include "dietsim/spectra.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <sstream>

#include "dietsim/constants.hpp"
#include "dietsim/errors.hpp"

namespace dietsim {

namespace {

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void check_decayed(const ProbeRecording& rec) {
    const std::size_t n = rec.size();
    if (n < 20) throw TruncatedRecording("recording too short for spectral analysis");
    const std::size_t tail = n - n / 20;
    double total = 0.0, trailing = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = rec.e[k] * rec.e[k] + phys::eta0 * phys::eta0 * rec.h[k] * rec.h[k];
        total += w;
        if (k >= tail) trailing += w;
    }
    if (total > 0.0 && !(trailing < 1e-6 * total))
        throw TruncatedRecording("probe at node " + std::to_string(rec.cell)
                                 + " has not decayed (trailing 5% holds "
                                 + std::to_string(trailing / total) + " of the energy); run longer");
}

void check_same_shape(const ProbeRecording& a, const ProbeRecording& b) {
    if (a.size() != b.size() || a.dt_sample != b.dt_sample || a.t_first != b.t_first)
        throw BandMismatch("recordings differ in length or sampling");
}

}  // namespace

ComplexSpectrum power_spectrum(const ProbeRecording& rec, const SpectralOptions& opt) {
    if (rec.e.size() != rec.h.size()) throw AnalysisError("probe E and H lengths differ");
    if (!(rec.dt_sample > 0.0)) throw AnalysisError("probe sampling interval must be positive");
    if (!(opt.resolution > 0.0) || !(opt.omega_hi > opt.omega_lo) || opt.omega_lo < 0.0)
        throw AnalysisError("spectral options: invalid band or resolution");
    check_decayed(rec);

    const std::size_t n = rec.size();
    const double needed = 2.0 * pi / (rec.dt_sample * opt.resolution);
    const std::size_t len = next_pow2(std::max<std::size_t>(std::max<std::size_t>(1, opt.pad_factor) * n,
                                                            static_cast<std::size_t>(std::ceil(needed))));
    const std::size_t bins = len / 2 + 1;

    FftwBuffer<double> in(static_cast<double*>(fftw_malloc(sizeof(double) * len)));
    FftwBuffer<fftw_complex> out(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
    if (!in || !out) throw std::bad_alloc();
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(len), in.get(), out.get(), FFTW_ESTIMATE);

    const double d_omega = 2.0 * pi / (static_cast<double>(len) * rec.dt_sample);
    const auto k_lo = static_cast<std::size_t>(std::ceil(opt.omega_lo / d_omega));
    const auto k_hi = std::min(bins - 1, static_cast<std::size_t>(std::floor(opt.omega_hi / d_omega)));

    ComplexSpectrum result;
    result.padded_length = len;
    for (std::size_t k = k_lo; k <= k_hi; ++k) result.omega.push_back(static_cast<double>(k) * d_omega);

    auto transform = [&](const std::vector<double>& x, double t0, std::vector<std::complex<double>>& dst) {
        std::fill(in.get(), in.get() + len, 0.0);
        std::copy(x.begin(), x.end(), in.get());
        fftw_execute(plan);
        dst.reserve(result.omega.size());
        for (std::size_t k = k_lo; k <= k_hi; ++k) {
            const double w = static_cast<double>(k) * d_omega;
            const std::complex<double> raw(out[k][0], out[k][1]);
            dst.push_back(raw * std::polar(rec.dt_sample, -w * t0));
        }
    };
    transform(rec.e, rec.t_first, result.e);
    // H was sampled h_offset earlier; shift it onto the E sample times.
    transform(rec.h, rec.t_first + rec.h_offset, result.h);
    fftw_destroy_plan(plan);
    return result;
}

std::vector<double> poynting_flux(const ComplexSpectrum& s) {
    std::vector<double> flux(s.omega.size());
    for (std::size_t k = 0; k < flux.size(); ++k) flux[k] = 0.5 * (s.e[k] * std::conj(s.h[k])).real();
    return flux;
}

SpectrumResult spectrum_from_flux(std::span<const double> omega, std::span<const double> incident,
                                  std::span<const double> transmitted, std::span<const double> reflected,
                                  const EmitterSpecies& reference, double band_threshold) {
    const std::size_t n = omega.size();
    if (incident.size() != n || transmitted.size() != n || reflected.size() != n)
        throw BandMismatch("flux spectra are on different axes");
    double peak = 0.0;
    for (double v : incident) peak = std::max(peak, v);
    if (!(peak > 0.0)) throw BandMismatch("incident spectrum carries no power in the analysis band");

    SpectrumResult out;
    std::size_t in_band = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const bool mask = incident[k] >= band_threshold * peak;
        const double t = mask ? transmitted[k] / incident[k] : 0.0;
        const double r = mask ? -reflected[k] / incident[k] : 0.0;
        const double d = reference.gamma() > 0.0 ? reduced_detuning(omega[k], reference)
                                                 : std::numeric_limits<double>::quiet_NaN();
        out.push_back(omega[k], d, t, r, mask);
        in_band += mask ? 1 : 0;
    }
    if (in_band == 0) throw BandMismatch("band mask is empty");
    return out;
}

SpectrumResult transmission_reflection(const RunProbes& main_run, const RunProbes& vacuum_run,
                                       const EmitterSpecies& reference, const SpectralOptions& options) {
    check_same_shape(main_run.transmitted, vacuum_run.transmitted);
    check_same_shape(main_run.reflected, vacuum_run.transmitted);
    if (main_run.transmitted.dt_sample * options.omega_hi > 0.25 * pi * (1.0 + 1e-12))
        throw AnalysisError("probe sampling too coarse for the analysis band");

    const ComplexSpectrum inc = power_spectrum(vacuum_run.transmitted, options);
    const ComplexSpectrum tra = power_spectrum(main_run.transmitted, options);
    const ComplexSpectrum ref = power_spectrum(main_run.reflected, options);
    const auto s_inc = poynting_flux(inc);
    const auto s_tra = poynting_flux(tra);
    const auto s_ref = poynting_flux(ref);
    return spectrum_from_flux(inc.omega, s_inc, s_tra, s_ref, reference, options.band_threshold);
}

// ---- peaks --------------------------------------------------------------------

std::vector<std::size_t> local_maxima(std::span<const double> y) {
    std::vector<std::size_t> peaks;
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (y[i] > y[i - 1] && y[i] > y[i + 1]) peaks.push_back(i);
    return peaks;
}

double peak_prominence(std::span<const double> y, std::size_t i) {
    double left = y[i], right = y[i];
    for (std::size_t j = i; j-- > 0 && y[j] <= y[i];) left = std::min(left, y[j]);
    for (std::size_t j = i + 1; j < y.size() && y[j] <= y[i]; ++j) right = std::min(right, y[j]);
    return y[i] - std::max(left, right);
}

std::vector<std::size_t> prominent_maxima(std::span<const double> y, double min_prominence) {
    std::vector<std::size_t> out;
    for (std::size_t i : local_maxima(y))
        if (peak_prominence(y, i) >= min_prominence) out.push_back(i);
    return out;
}

std::vector<double> level_crossings(std::span<const double> x, std::span<const double> y, double level) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
        const double a = y[i] - level;
        const double b = y[i + 1] - level;
        if (a == 0.0) out.push_back(x[i]);
        else if (a * b < 0.0) out.push_back(x[i] + (x[i + 1] - x[i]) * a / (a - b));
    }
    if (!y.empty() && y.back() == level) out.push_back(x.back());
    return out;
}

Transparency find_transparency(const SpectrumResult& spectrum, double omega_lo, double omega_hi,
                               double min_prominence) {
    const SpectrumResult s = spectrum.masked();
    std::vector<double> w, d, t;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s.omega[k] > omega_lo && s.omega[k] < omega_hi) {
            w.push_back(s.omega[k]);
            d.push_back(s.delta[k]);
            t.push_back(s.transmission[k]);
        }
    }
    Transparency best;
    best.prominence = -1.0;
    std::size_t best_i = 0;
    for (std::size_t i : local_maxima(t)) {
        const double prominence = peak_prominence(t, i);
        if (prominence > best.prominence) {
            best.prominence = prominence;
            best_i = i;
        }
    }
    if (best.prominence < min_prominence)
        throw NoTransparency("no interior transmission maximum between the resonances");

    // Parabolic refinement of the peak position on the sampled grid.
    const std::size_t i = best_i;
    const double y0 = t[i - 1], y1 = t[i], y2 = t[i + 1];
    const double curvature = y0 - 2.0 * y1 + y2;
    const double shift = curvature != 0.0 ? 0.5 * (y0 - y2) / curvature : 0.0;
    best.omega = w[i] + shift * (w[i + 1] - w[i - 1]) * 0.5;
    best.peak = y1 - 0.25 * (y0 - y2) * shift;
    best.delta = d[i] + (best.omega - w[i]) * (d[i + 1] - d[i - 1]) / (w[i + 1] - w[i - 1]);

    const double half = 0.5 * best.peak;
    double lo = std::numeric_limits<double>::quiet_NaN(), hi = lo;
    for (std::size_t j = i; j > 0; --j) {
        if (t[j - 1] < half) {
            lo = w[j - 1] + (w[j] - w[j - 1]) * (half - t[j - 1]) / (t[j] - t[j - 1]);
            break;
        }
    }
    for (std::size_t j = i; j + 1 < t.size(); ++j) {
        if (t[j + 1] < half) {
            hi = w[j] + (w[j + 1] - w[j]) * (t[j] - half) / (t[j] - t[j + 1]);
            break;
        }
    }
    best.fwhm = hi - lo;
    return best;
}

// ---- time domain ----------------------------------------------------------------

double flux_centroid(const ProbeRecording& rec) {
    double weight = 0.0, moment = 0.0;
    for (std::size_t k = 0; k < rec.size(); ++k) {
        const double s = rec.e[k] * rec.h[k];
        weight += s;
        moment += s * rec.time(k);
    }
    if (!(weight > 0.0)) throw OpaqueMedium("no net forward flux at the probe");
    return moment / weight;
}

double group_delay(const ProbeRecording& main_transmitted, const ProbeRecording& vacuum_transmitted) {
    check_same_shape(main_transmitted, vacuum_transmitted);
    double e_main = 0.0, e_vac = 0.0;
    for (std::size_t k = 0; k < main_transmitted.size(); ++k) {
        e_main += main_transmitted.e[k] * main_transmitted.h[k];
        e_vac += vacuum_transmitted.e[k] * vacuum_transmitted.h[k];
    }
    if (!(e_vac > 0.0)) throw OpaqueMedium("vacuum reference carries no flux");
    if (!(e_main >= 1e-6 * e_vac))
        throw OpaqueMedium("transmitted energy below 1e-6 of the incident energy");
    return flux_centroid(main_transmitted) - flux_centroid(vacuum_transmitted);
}

// ---- spectrum I/O ----------------------------------------------------------------

void SpectrumResult::push_back(double w, double d, double t, double r, bool in_band) {
    omega.push_back(w);
    delta.push_back(d);
    transmission.push_back(t);
    reflection.push_back(r);
    extinction.push_back(1.0 - t - r);
    band_mask.push_back(in_band ? 1 : 0);
}

SpectrumResult SpectrumResult::masked() const {
    SpectrumResult out;
    for (std::size_t k = 0; k < size(); ++k) {
        if (!band_mask[k]) continue;
        out.omega.push_back(omega[k]);
        out.delta.push_back(delta[k]);
        out.transmission.push_back(transmission[k]);
        out.reflection.push_back(reflection[k]);
        out.extinction.push_back(extinction[k]);
        out.band_mask.push_back(1);
    }
    return out;
}

namespace {
constexpr const char* csv_header = "delta,omega,T,R,extinction";
}

void write_spectrum_csv(const SpectrumResult& spectrum, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw AnalysisError("cannot write " + path.string());
    out << csv_header << '\n' << std::setprecision(9);
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        if (!spectrum.band_mask[k]) continue;
        out << spectrum.delta[k] << ',' << spectrum.omega[k] << ',' << spectrum.transmission[k] << ','
            << spectrum.reflection[k] << ',' << spectrum.extinction[k] << '\n';
    }
    if (!out) throw AnalysisError("write failed for " + path.string());
}

SpectrumResult read_spectrum_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw AnalysisError("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != csv_header)
        throw AnalysisError(path.string() + ": header is not `" + csv_header + "`");
    SpectrumResult s;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::array<double, 5> v{};
        std::istringstream fields(line);
        std::string cell;
        std::size_t col = 0;
        for (; col < v.size() && std::getline(fields, cell, ','); ++col) {
            try {
                std::size_t used = 0;
                v[col] = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw AnalysisError(path.string() + ": malformed value on row " + std::to_string(row));
            }
        }
        if (col != v.size() || std::getline(fields, cell, ','))
            throw AnalysisError(path.string() + ": row " + std::to_string(row) + " does not have 5 columns");
        s.omega.push_back(v[1]);
        s.delta.push_back(v[0]);
        s.transmission.push_back(v[2]);
        s.reflection.push_back(v[3]);
        s.extinction.push_back(v[4]);
        s.band_mask.push_back(1);
    }
    return s;
}

void write_metadata(const Metadata& meta, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw AnalysisError("cannot write " + path.string());
    for (const auto& [key, value] : meta) out << key << '=' << value << '\n';
}

Metadata read_metadata(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw AnalysisError("cannot read " + path.string());
    Metadata meta;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw AnalysisError(path.string() + ": line without '=': " + line);
        meta[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return meta;
}

}  // namespace dietsim
