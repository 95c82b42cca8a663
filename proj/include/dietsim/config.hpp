#pragma once

// Scenario configuration as flat `key=value` text.
//
// Raw keys may use convenience units; normalize_config() turns them into a
// ScenarioConfig in absolute SI units, and serialize_config() writes that
// normalized form back using only the SI keys:
//
//   name, mode (spectrum | pulse-delay | analytic-only), coupling
//   medium.thickness, medium.z_start, medium.species (count)
//   species.<i>.omega01 | .wavelength | .detuning (reduced, vs species 0)
//   species.<i>.mu01 | .mu01_au
//   species.<i>.Gamma, species.<i>.gamma_star
//   species.<i>.n0 | .shift_ratio (Delta / gamma of that species)
//   grid.dz (number | auto), grid.dz_max, grid.courant, grid.duration (number | auto)
//   source.kind (gaussian | cw), source.carrier | .carrier_detuning,
//   source.fwhm, source.ramp, source.peak_e | .peak_rabi (units of gamma)
//   output.decimation (number | auto)
//   analysis.delta_lo, analysis.delta_hi
//
// Keys under `info.` are ignored, so a metadata sidecar parses as a config.

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dietsim/fdtd.hpp"
#include "dietsim/material.hpp"
#include "dietsim/source.hpp"

namespace dietsim {

using RawConfig = std::map<std::string, std::string>;

enum class RunMode { spectrum, pulse_delay, analytic_only };

const char* to_string(RunMode mode) noexcept;

struct ScenarioConfig {
    std::string name = "custom";
    RunMode mode = RunMode::spectrum;
    Coupling coupling = Coupling::mutual;
    SlabMedium medium;
    double dz = 0.0;
    double dz_max = 1e-9;
    double courant = 0.5;
    double duration = 0.0;
    SourceSpec source;  ///< injection_cell is filled in from the layout at run time
    std::size_t decimation = 1;
    double delta_lo = -60.0;
    double delta_hi = 80.0;

    const EmitterSpecies& reference() const { return medium.species.at(0); }
    double omega_lo() const;
    double omega_hi() const;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Reads `key = value` lines; blank lines and `#` comments are skipped.
/// Throws ConfigError on malformed lines or duplicate keys.
RawConfig read_raw_config(const std::filesystem::path& path);
RawConfig parse_raw_config(const std::string& text);

/// Throws ConfigError (naming the offending key) on unknown keys, bad
/// numbers or inconsistent values.
ScenarioConfig normalize_config(const RawConfig& raw);

/// SI keys only, numbers with 17 significant digits.
RawConfig serialize_config(const ScenarioConfig& config);
std::string format_config(const RawConfig& raw);

std::vector<std::string> preset_names();
RawConfig preset_raw(const std::string& name);
ScenarioConfig preset(const std::string& name);

}  // namespace dietsim
