#pragma once

// Orchestration of a scenario: vacuum reference and main FDTD runs (or the
// closed-form model alone), spectral analysis, derived observables and the
// files written to an output directory.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dietsim/config.hpp"
#include "dietsim/fdtd.hpp"
#include "dietsim/spectra.hpp"

namespace dietsim {

Layout scenario_layout(const ScenarioConfig& config);

/// Setup for the main run, or for the vacuum reference (same grid, source
/// and probes, no emitters).
SimulationSetup scenario_setup(const ScenarioConfig& config, bool vacuum, const EngineOptions& engine = {});

SpectralOptions spectral_options(const ScenarioConfig& config);

struct FdtdRun {
    RunProbes probes;
    RunStats stats;
    Grid1D grid;
    Layout layout;
};

FdtdRun run_fdtd(const ScenarioConfig& config, bool vacuum, const EngineOptions& engine = {});

/// Everything a vacuum reference depends on; equal keys mean reusable runs.
std::string vacuum_key(const ScenarioConfig& config);

struct SummaryLine {
    std::string key;
    std::string value;
};

struct PulseSpectra {
    std::vector<double> omega, delta, incident, transmitted, reflected;
};

struct ScenarioResult {
    ScenarioConfig config;
    SpectrumResult spectrum;
    bool analytic = false;
    std::vector<SummaryLine> summary;
    std::optional<PulseSpectra> pulse;
    std::optional<double> delay;
    std::optional<RunStats> stats;
    std::optional<Grid1D> grid;
};

/// Runs the scenario in its configured mode. A matching vacuum reference may
/// be passed in to skip that run.
ScenarioResult run_scenario(const ScenarioConfig& config, const FdtdRun* vacuum = nullptr,
                            const EngineOptions& engine = {});

/// Spectra from the closed-form slab model on a gamma/8 grid over the band.
ScenarioResult run_analytic(const ScenarioConfig& config);

/// Derived observables of a spectrum for the scenario's medium.
std::vector<SummaryLine> summarize(const ScenarioConfig& config, const SpectrumResult& spectrum);

/// spectrum.csv, metadata.txt, summary.txt, plus pulse_spectra.csv
/// (pulse-delay mode) or susceptibility.csv (analytic results).
void write_artifacts(const ScenarioResult& result, const std::filesystem::path& dir);

/// Exit status for an exception escaping a run: 2 config, 3 numerical, 4 analysis, 1 otherwise.
int exit_code_for(const std::exception& error) noexcept;

}  // namespace dietsim
