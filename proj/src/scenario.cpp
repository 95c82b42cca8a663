#include "dietsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>

#include "dietsim/constants.hpp"
#include "dietsim/errors.hpp"
#include "dietsim/lorentz.hpp"

namespace dietsim {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void add(std::vector<SummaryLine>& out, std::string key, std::string value) {
    out.push_back({std::move(key), std::move(value)});
}

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

void summarize_single(const ScenarioConfig& config, const SpectrumResult& m, std::vector<SummaryLine>& out) {
    const EmitterSpecies& ref = config.reference();
    const double max_ext = *std::max_element(m.extinction.begin(), m.extinction.end());
    std::string maxima;
    for (std::size_t i : prominent_maxima(m.extinction, 0.01 * max_ext))
        maxima += (maxima.empty() ? "" : ";") + num(m.delta[i]);
    add(out, "extinction_maxima_delta", maxima.empty() ? "none" : maxima);

    if (ref.lorentz_shift() < 0.5 * ref.gamma()) {
        const std::size_t peak = argmax(m.extinction);
        std::vector<double> x, ext, absorbance;
        for (std::size_t k = 0; k < m.size(); ++k) {
            if (std::abs(m.delta[k] - m.delta[peak]) > 10.0) continue;
            x.push_back(m.delta[k]);
            ext.push_back(m.extinction[k]);
            absorbance.push_back(-std::log(std::max(m.transmission[k], 1e-300)));
        }
        const LorentzFit fit = fit_lorentzian(x, ext);
        add(out, "lorentz_center_delta", num(fit.center));
        add(out, "lorentz_half_width_gamma", num(fit.half_width));
        add(out, "lorentz_residual_rms", num(fit.residual_rms));
        const LorentzFit fit_abs = fit_lorentzian(x, absorbance);
        add(out, "absorbance_half_width_gamma", num(fit_abs.half_width));
    }

    const std::size_t rpeak = argmax(m.reflection);
    if (m.reflection[rpeak] >= 0.5) {
        double lo = std::nan(""), hi = std::nan("");
        for (double x : level_crossings(m.delta, m.reflection, 0.5)) {
            if (x < m.delta[rpeak]) lo = x;
            else if (std::isnan(hi)) hi = x;
        }
        add(out, "reflection_edge_lo_delta", num(lo));
        add(out, "reflection_edge_hi_delta", num(hi));
        add(out, "reflection_width_shift", num((hi - lo) * ref.gamma() / ref.lorentz_shift()));
        const FrequencyWindow w = reflection_window(ref);
        add(out, "reflection_analytic_lo_delta", num(reduced_detuning(w.low, ref)));
        add(out, "reflection_analytic_hi_delta", num(reduced_detuning(w.high, ref)));
    }
}

void summarize_pair(const ScenarioConfig& config, const SpectrumResult& spectrum, std::vector<SummaryLine>& out) {
    const EmitterSpecies& a = config.medium.species[0];
    const EmitterSpecies& b = config.medium.species[1];
    const EmitterSpecies& ref = config.reference();
    add(out, "transparency_predicted_delta", num(reduced_detuning(transparency_frequency(a, b), ref)));
    add(out, "transparency_chi_min_delta", num(reduced_detuning(transparency_frequency_numeric(a, b), ref)));
    try {
        const Transparency t = find_transparency(spectrum, std::min(a.omega01, b.omega01),
                                                 std::max(a.omega01, b.omega01));
        add(out, "transparency_delta", num(t.delta));
        add(out, "transparency_T", num(t.peak));
        add(out, "transparency_fwhm_gamma", num(t.fwhm / ref.gamma()));
        const SpectrumResult m = spectrum.masked();
        std::vector<double> neg(m.size());
        for (std::size_t k = 0; k < m.size(); ++k) neg[k] = -m.reflection[k];
        double best = std::nan("");
        for (std::size_t i : local_maxima(neg))
            if (std::isnan(best) || std::abs(m.delta[i] - t.delta) < std::abs(best - t.delta)) best = m.delta[i];
        add(out, "reflection_min_delta", num(best));
    } catch (const NoTransparency&) {
        add(out, "transparency_delta", "none");
    }
}

}  // namespace

Layout scenario_layout(const ScenarioConfig& config) { return make_layout(config.medium, config.dz); }

SimulationSetup scenario_setup(const ScenarioConfig& config, bool vacuum, const EngineOptions& engine) {
    const Layout layout = scenario_layout(config);
    SimulationSetup setup;
    setup.grid = make_grid(layout, config.dz, config.courant);
    if (!vacuum) setup.species = config.medium.species;
    setup.source = config.source;
    setup.source->injection_cell = layout.injection;
    setup.probes = {layout.reflection_probe, layout.transmission_probe};
    setup.options = engine;
    setup.options.coupling = config.coupling;
    setup.options.decimation = config.decimation;
    return setup;
}

SpectralOptions spectral_options(const ScenarioConfig& config) {
    SpectralOptions opt;
    opt.omega_lo = config.omega_lo();
    opt.omega_hi = config.omega_hi();
    opt.resolution = config.reference().gamma() / 8.0;
    return opt;
}

FdtdRun run_fdtd(const ScenarioConfig& config, bool vacuum, const EngineOptions& engine) {
    Simulation sim(scenario_setup(config, vacuum, engine));
    sim.run_until(config.duration);
    FdtdRun run;
    run.probes.reflected = sim.recordings()[0];
    run.probes.transmitted = sim.recordings()[1];
    run.stats = sim.stats();
    run.grid = sim.grid();
    run.layout = scenario_layout(config);
    return run;
}

std::string vacuum_key(const ScenarioConfig& config) {
    const RawConfig raw = serialize_config(config);
    std::string key;
    for (const char* k : {"medium.thickness", "medium.z_start", "grid.dz", "grid.courant", "grid.duration",
                          "source.kind", "source.carrier", "source.fwhm", "source.ramp", "source.peak_e",
                          "output.decimation"})
        key += std::string(k) + '=' + raw.at(k) + ';';
    return key;
}

std::vector<SummaryLine> summarize(const ScenarioConfig& config, const SpectrumResult& spectrum) {
    std::vector<SummaryLine> out;
    const SpectrumResult m = spectrum.masked();
    if (m.size() == 0) throw BandMismatch("no frequencies inside the band mask");
    double max_sum = -1e300, min_ext = 1e300;
    for (std::size_t k = 0; k < m.size(); ++k) {
        max_sum = std::max(max_sum, m.transmission[k] + m.reflection[k]);
        min_ext = std::min(min_ext, m.extinction[k]);
    }
    add(out, "band_points", std::to_string(m.size()));
    add(out, "band_delta", num(m.delta.front()) + ";" + num(m.delta.back()));
    add(out, "max_T", num(*std::max_element(m.transmission.begin(), m.transmission.end())));
    add(out, "max_R", num(*std::max_element(m.reflection.begin(), m.reflection.end())));
    add(out, "max_T_plus_R", num(max_sum));
    add(out, "min_extinction", num(min_ext));

    bool dense = false;
    for (const auto& s : config.medium.species) dense = dense || s.n0 > 0.0;
    if (!dense) return out;
    if (config.medium.species.size() == 1) summarize_single(config, m, out);
    else summarize_pair(config, spectrum, out);
    return out;
}

ScenarioResult run_scenario(const ScenarioConfig& config, const FdtdRun* vacuum, const EngineOptions& engine) {
    if (config.mode == RunMode::analytic_only) return run_analytic(config);

    std::optional<FdtdRun> own_vacuum;
    if (!vacuum) {
        own_vacuum = run_fdtd(config, true, engine);
        vacuum = &*own_vacuum;
    }
    const FdtdRun main = run_fdtd(config, false, engine);

    ScenarioResult result;
    result.config = config;
    result.spectrum = transmission_reflection(main.probes, vacuum->probes, config.reference(),
                                              spectral_options(config));
    result.summary = summarize(config, result.spectrum);
    result.stats = main.stats;
    result.grid = main.grid;
    add(result.summary, "steps", std::to_string(main.stats.steps));
    add(result.summary, "max_trace_error", num(main.stats.bloch.trace_error));
    add(result.summary, "max_positivity_excess", num(main.stats.bloch.positivity_excess));

    if (config.mode == RunMode::pulse_delay) {
        const SpectralOptions opt = spectral_options(config);
        const ComplexSpectrum inc = power_spectrum(vacuum->probes.transmitted, opt);
        const auto s_inc = poynting_flux(inc);
        const auto s_tra = poynting_flux(power_spectrum(main.probes.transmitted, opt));
        const auto s_ref = poynting_flux(power_spectrum(main.probes.reflected, opt));
        PulseSpectra pulse;
        for (std::size_t k = 0; k < inc.omega.size(); ++k) {
            pulse.omega.push_back(inc.omega[k]);
            pulse.delta.push_back(reduced_detuning(inc.omega[k], config.reference()));
            pulse.incident.push_back(s_inc[k]);
            pulse.transmitted.push_back(s_tra[k]);
            pulse.reflected.push_back(-s_ref[k]);
        }

        const double delay = group_delay(main.probes.transmitted, vacuum->probes.transmitted);
        result.delay = delay;
        std::vector<double> weight(pulse.omega.size());
        for (std::size_t k = 0; k < weight.size(); ++k) weight[k] = std::max(pulse.transmitted[k], 0.0);
        const double ng = band_averaged_group_index(pulse.omega, weight, config.medium);
        add(result.summary, "group_delay_s", num(delay));
        add(result.summary, "group_delay_thickness_transits", num(delay * phys::c / config.medium.thickness));
        add(result.summary, "band_averaged_group_index", num(ng));
        add(result.summary, "predicted_delay_s", num((ng - 1.0) * config.medium.thickness / phys::c));
        result.pulse = std::move(pulse);
    }
    return result;
}

ScenarioResult run_analytic(const ScenarioConfig& config) {
    const EmitterSpecies& ref = config.reference();
    std::vector<double> omega;
    for (double d = config.delta_lo; d <= config.delta_hi + 1e-9; d += 0.125)
        omega.push_back(omega_from_detuning(d, ref));
    ScenarioResult result;
    result.config = config;
    result.analytic = true;
    result.spectrum = slab_spectra(omega, config.medium);
    result.summary = summarize(config, result.spectrum);
    return result;
}

void write_artifacts(const ScenarioResult& result, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw AnalysisError("cannot create output directory " + dir.string() + ": " + ec.message());

    write_spectrum_csv(result.spectrum, dir / "spectrum.csv");

    Metadata meta = serialize_config(result.config);
    meta["info.source"] = result.analytic ? "analytic" : "fdtd";
    if (result.grid) {
        meta["info.nz"] = std::to_string(result.grid->nz);
        meta["info.slab_cells"] = std::to_string(result.grid->slab_size());
        meta["info.dt"] = exact(result.grid->dt);
    }
    if (result.stats) meta["info.steps"] = std::to_string(result.stats->steps);
    write_metadata(meta, dir / "metadata.txt");

    std::ofstream summary(dir / "summary.txt");
    for (const auto& line : result.summary) summary << line.key << '=' << line.value << '\n';
    if (!summary) throw AnalysisError("write failed for summary.txt");

    if (result.pulse) {
        std::ofstream out(dir / "pulse_spectra.csv");
        out << "delta,omega,incident,transmitted,reflected\n" << std::setprecision(9);
        const PulseSpectra& p = *result.pulse;
        for (std::size_t k = 0; k < p.omega.size(); ++k)
            out << p.delta[k] << ',' << p.omega[k] << ',' << p.incident[k] << ',' << p.transmitted[k] << ','
                << p.reflected[k] << '\n';
        if (!out) throw AnalysisError("write failed for pulse_spectra.csv");
    }
    if (result.analytic) {
        std::ofstream out(dir / "susceptibility.csv");
        out << "delta,omega,chi_re,chi_im,n_re,n_im\n" << std::setprecision(9);
        for (std::size_t k = 0; k < result.spectrum.size(); ++k) {
            const double w = result.spectrum.omega[k];
            const cplx chi = chi_medium(w, result.config.medium);
            const cplx n = refractive_index(chi);
            out << result.spectrum.delta[k] << ',' << w << ',' << chi.real() << ',' << chi.imag() << ','
                << n.real() << ',' << n.imag() << '\n';
        }
        if (!out) throw AnalysisError("write failed for susceptibility.csv");
    }
}

int exit_code_for(const std::exception& error) noexcept {
    if (dynamic_cast<const ConfigError*>(&error)) return 2;
    if (dynamic_cast<const NumericalError*>(&error)) return 3;
    if (dynamic_cast<const AnalysisError*>(&error)) return 4;
    return 1;
}

}  // namespace dietsim
