#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace dietsim {

/// Transmission/reflection spectrum on an angular-frequency axis.
/// extinction is always 1 - T - R.
struct SpectrumResult {
    std::vector<double> omega;
    std::vector<double> delta;  ///< reduced detuning w.r.t. the reference species
    std::vector<double> transmission;
    std::vector<double> reflection;
    std::vector<double> extinction;
    std::vector<std::uint8_t> band_mask;  ///< 1 where the incident power is above threshold

    std::size_t size() const noexcept { return omega.size(); }

    void push_back(double w, double d, double t, double r, bool in_band = true);

    /// Copy containing only the masked rows.
    SpectrumResult masked() const;
};

/// CSV with header `delta,omega,T,R,extinction`, masked rows only,
/// 9 significant digits.
void write_spectrum_csv(const SpectrumResult& spectrum, const std::filesystem::path& path);

/// Reads a file written by write_spectrum_csv. Throws AnalysisError on a
/// header mismatch or malformed row.
SpectrumResult read_spectrum_csv(const std::filesystem::path& path);

}  // namespace dietsim
