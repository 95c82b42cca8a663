#include "dietsim/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "dietsim/constants.hpp"
#include "dietsim/errors.hpp"
#include "dietsim/lorentz.hpp"

namespace dietsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Tracks which keys were consumed so leftovers can be reported.
class Reader {
public:
    explicit Reader(const RawConfig& raw) : raw_(raw) {}

    bool has(const std::string& key) const { return raw_.count(key) != 0; }

    std::string text(const std::string& key, const std::string& fallback) {
        used_.insert(key);
        const auto it = raw_.find(key);
        return it == raw_.end() ? fallback : it->second;
    }

    double number(const std::string& key, double fallback) {
        used_.insert(key);
        const auto it = raw_.find(key);
        return it == raw_.end() ? fallback : parse(key, it->second);
    }

    /// Returns NaN for `auto`.
    double number_or_auto(const std::string& key) {
        used_.insert(key);
        const auto it = raw_.find(key);
        if (it == raw_.end() || it->second == "auto") return std::nan("");
        return parse(key, it->second);
    }

    void check_all_used() const {
        for (const auto& [key, value] : raw_) {
            if (key.rfind("info.", 0) == 0) continue;
            if (!used_.count(key)) throw ConfigError("config: unknown key `" + key + "`");
        }
    }

    static double parse(const std::string& key, const std::string& value) {
        const char* begin = value.c_str();
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v))
            throw ConfigError("config: `" + key + "` expects a finite number, got `" + value + "`");
        return v;
    }

private:
    const RawConfig& raw_;
    std::set<std::string> used_;
};

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw InvalidParameter("config: `" + key + "` " + what);
}

std::size_t species_count(const RawConfig& raw, Reader& reader) {
    std::size_t count = 0;
    for (const auto& [key, value] : raw) {
        if (key.rfind("species.", 0) != 0) continue;
        const auto dot = key.find('.', 8);
        const std::string index = key.substr(8, dot == std::string::npos ? std::string::npos : dot - 8);
        require(!index.empty() && std::all_of(index.begin(), index.end(), ::isdigit), key, "has a bad species index");
        count = std::max(count, static_cast<std::size_t>(std::stoul(index)) + 1);
    }
    if (reader.has("medium.species")) {
        const double declared = reader.number("medium.species", 0.0);
        require(declared >= 1.0 && declared <= 2.0 && declared == std::floor(declared), "medium.species",
                "must be 1 or 2");
        require(count <= static_cast<std::size_t>(declared), "medium.species", "is smaller than the species keys used");
        count = static_cast<std::size_t>(declared);
    }
    return std::max<std::size_t>(count, 1);
}

}  // namespace

const char* to_string(RunMode mode) noexcept {
    switch (mode) {
    case RunMode::spectrum: return "spectrum";
    case RunMode::pulse_delay: return "pulse-delay";
    case RunMode::analytic_only: return "analytic-only";
    }
    return "?";
}

double ScenarioConfig::omega_lo() const { return omega_from_detuning(delta_lo, reference()); }
double ScenarioConfig::omega_hi() const { return omega_from_detuning(delta_hi, reference()); }

RawConfig parse_raw_config(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string body = trim(line.substr(0, line.find('#')));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(number) + ": expected key=value");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
        if (!raw.emplace(key, value).second)
            throw ConfigError("config line " + std::to_string(number) + ": duplicate key `" + key + "`");
    }
    return raw;
}

RawConfig read_raw_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_raw_config(buffer.str());
}

ScenarioConfig normalize_config(const RawConfig& raw) {
    Reader r(raw);
    ScenarioConfig c;
    c.name = r.text("name", "custom");
    require(!c.name.empty(), "name", "must not be empty");

    const std::string mode = r.text("mode", "spectrum");
    if (mode == "spectrum") c.mode = RunMode::spectrum;
    else if (mode == "pulse-delay") c.mode = RunMode::pulse_delay;
    else if (mode == "analytic-only") c.mode = RunMode::analytic_only;
    else throw ConfigError("config: `mode` must be spectrum, pulse-delay or analytic-only");

    const std::string coupling = r.text("coupling", "mutual");
    if (coupling == "mutual") c.coupling = Coupling::mutual;
    else if (coupling == "independent") c.coupling = Coupling::independent;
    else throw ConfigError("config: `coupling` must be mutual or independent");

    c.medium.thickness = r.number("medium.thickness", 400e-9);
    c.medium.z_start = r.number("medium.z_start", 100e-9);
    require(c.medium.thickness > 0.0, "medium.thickness", "must be positive");
    require(c.medium.z_start > 0.0, "medium.z_start", "must be positive");

    const std::size_t count = species_count(raw, r);
    for (std::size_t i = 0; i < count; ++i) {
        const std::string p = "species." + std::to_string(i) + ".";
        EmitterSpecies s;
        if (r.has(p + "omega01")) {
            s.omega01 = r.number(p + "omega01", 0.0);
        } else if (r.has(p + "detuning")) {
            require(i > 0, p + "detuning", "is relative to species 0 and cannot be used on it");
            s.omega01 = omega_from_detuning(r.number(p + "detuning", 0.0), c.medium.species[0]);
        } else {
            const double lambda = r.number(p + "wavelength", 620e-9);
            require(lambda > 0.0, p + "wavelength", "must be positive");
            s.omega01 = omega_from_wavelength(lambda);
        }
        s.mu01 = r.has(p + "mu01") ? r.number(p + "mu01", 0.0) : r.number(p + "mu01_au", 1.0) * phys::atomic_dipole;
        s.Gamma = r.number(p + "Gamma", 1e11);
        s.gamma_star = r.number(p + "gamma_star", 1e12);
        require(!(r.has(p + "n0") && r.has(p + "shift_ratio")), p + "n0", "and shift_ratio are exclusive");
        if (r.has(p + "shift_ratio")) {
            const double ratio = r.number(p + "shift_ratio", 0.0);
            require(ratio >= 0.0, p + "shift_ratio", "must be non-negative");
            s.n0 = density_from_shift(ratio * s.gamma(), s.mu01);
        } else {
            s.n0 = r.number(p + "n0", 0.0);
        }
        try {
            s.validate();
        } catch (const InvalidParameter& e) {
            throw InvalidParameter("config: species " + std::to_string(i) + ": " + e.what());
        }
        const double shift = s.lorentz_shift();
        if (!(s.omega01 * s.omega01 - 2.0 * s.omega01 * shift > 0.0))
            throw DegenerateMedium("config: species " + std::to_string(i)
                                   + " is so dense that its shifted resonance vanishes");
        c.medium.species.push_back(s);
    }
    c.medium.validate();
    const EmitterSpecies& ref = c.medium.species[0];
    if (!(ref.gamma() > 0.0)) throw DegenerateDetuning("config: species 0 needs gamma > 0 for the detuning axis");

    c.delta_lo = r.number("analysis.delta_lo", -60.0);
    c.delta_hi = r.number("analysis.delta_hi", 80.0);
    require(c.delta_lo < c.delta_hi, "analysis.delta_lo", "must be below analysis.delta_hi");
    require(c.omega_lo() > 0.0, "analysis.delta_lo", "puts the band at negative frequency");

    c.courant = r.number("grid.courant", 0.5);
    require(c.courant > 0.0 && c.courant <= 1.0, "grid.courant", "must lie in (0, 1]");
    c.dz_max = r.number("grid.dz_max", 1e-9);
    require(c.dz_max > 0.0, "grid.dz_max", "must be positive");
    const double dz = r.number_or_auto("grid.dz");
    c.dz = std::isnan(dz) ? resolving_cell_size(c.medium, c.dz_max, c.omega_lo(), c.omega_hi()) : dz;
    require(c.dz > 0.0 && c.dz < c.medium.thickness, "grid.dz", "must be positive and below the slab thickness");
    const double dt = c.courant * c.dz / phys::c;

    const std::string kind = r.text("source.kind", "gaussian");
    if (kind == "gaussian") c.source.kind = SourceKind::gaussian_pulse;
    else if (kind == "cw") c.source.kind = SourceKind::cw_ramp;
    else throw ConfigError("config: `source.kind` must be gaussian or cw");
    require(!(r.has("source.carrier") && r.has("source.carrier_detuning")), "source.carrier",
            "and source.carrier_detuning are exclusive");
    c.source.carrier = r.has("source.carrier") ? r.number("source.carrier", 0.0)
                                               : omega_from_detuning(r.number("source.carrier_detuning", 10.0), ref);
    c.source.fwhm_duration = r.number("source.fwhm", c.source.kind == SourceKind::gaussian_pulse ? 20e-15 : 0.0);
    c.source.ramp_time = r.number("source.ramp", c.source.kind == SourceKind::cw_ramp ? 20.0 / ref.gamma() : 0.0);
    require(!(r.has("source.peak_e") && r.has("source.peak_rabi")), "source.peak_e",
            "and source.peak_rabi are exclusive");
    c.source.peak_e = r.has("source.peak_e")
                          ? r.number("source.peak_e", 0.0)
                          : r.number("source.peak_rabi", 1e-3) * ref.gamma() * phys::hbar / ref.coupling_dipole();
    try {
        c.source.validate();
    } catch (const InvalidParameter& e) {
        throw InvalidParameter(std::string("config: ") + e.what());
    }

    const double duration = r.number_or_auto("grid.duration");
    if (std::isnan(duration)) {
        double slowest = ref.gamma();
        for (const auto& s : c.medium.species)
            if (s.gamma() > 0.0) slowest = std::min(slowest, s.gamma());
        const double lead = c.source.kind == SourceKind::gaussian_pulse ? 10.0 * c.source.fwhm_duration
                                                                        : c.source.ramp_time;
        c.duration = lead + 8.0 / slowest;
    } else {
        c.duration = duration;
    }
    require(c.duration > 0.0, "grid.duration", "must be positive");

    const double decimation = r.number_or_auto("output.decimation");
    if (std::isnan(decimation)) {
        const double band_top = omega_from_detuning(std::max(c.delta_hi, 80.0), ref);
        c.decimation = static_cast<std::size_t>(std::max(1.0, std::floor(0.25 * pi / (band_top * dt))));
    } else {
        require(decimation >= 1.0 && decimation == std::floor(decimation), "output.decimation",
                "must be a positive integer");
        c.decimation = static_cast<std::size_t>(decimation);
    }

    r.check_all_used();
    return c;
}

RawConfig serialize_config(const ScenarioConfig& c) {
    RawConfig raw;
    raw["name"] = c.name;
    raw["mode"] = to_string(c.mode);
    raw["coupling"] = c.coupling == Coupling::mutual ? "mutual" : "independent";
    raw["medium.thickness"] = format_number(c.medium.thickness);
    raw["medium.z_start"] = format_number(c.medium.z_start);
    raw["medium.species"] = std::to_string(c.medium.species.size());
    for (std::size_t i = 0; i < c.medium.species.size(); ++i) {
        const std::string p = "species." + std::to_string(i) + ".";
        const EmitterSpecies& s = c.medium.species[i];
        raw[p + "omega01"] = format_number(s.omega01);
        raw[p + "mu01"] = format_number(s.mu01);
        raw[p + "Gamma"] = format_number(s.Gamma);
        raw[p + "gamma_star"] = format_number(s.gamma_star);
        raw[p + "n0"] = format_number(s.n0);
    }
    raw["grid.dz"] = format_number(c.dz);
    raw["grid.dz_max"] = format_number(c.dz_max);
    raw["grid.courant"] = format_number(c.courant);
    raw["grid.duration"] = format_number(c.duration);
    raw["source.kind"] = c.source.kind == SourceKind::gaussian_pulse ? "gaussian" : "cw";
    raw["source.carrier"] = format_number(c.source.carrier);
    raw["source.fwhm"] = format_number(c.source.fwhm_duration);
    raw["source.ramp"] = format_number(c.source.ramp_time);
    raw["source.peak_e"] = format_number(c.source.peak_e);
    raw["output.decimation"] = std::to_string(c.decimation);
    raw["analysis.delta_lo"] = format_number(c.delta_lo);
    raw["analysis.delta_hi"] = format_number(c.delta_hi);
    return raw;
}

std::string format_config(const RawConfig& raw) {
    std::string out;
    for (const auto& [key, value] : raw) out += key + '=' + value + '\n';
    return out;
}

std::vector<std::string> preset_names() {
    return {"fig2-low", "fig2-mid", "fig2-high", "fig3", "fig4", "fig5"};
}

RawConfig preset_raw(const std::string& name) {
    RawConfig raw{{"name", name}, {"medium.thickness", "400e-9"}, {"species.0.wavelength", "620e-9"},
                  {"species.0.mu01_au", "1"}, {"species.0.Gamma", "1e11"}, {"species.0.gamma_star", "1e12"}};
    auto second_species = [&raw] {
        raw["species.1.detuning"] = "50";
        raw["species.1.mu01_au"] = "1";
        raw["species.1.Gamma"] = "1e11";
        raw["species.1.gamma_star"] = "1e12";
        raw["species.0.shift_ratio"] = "18";
        raw["species.1.shift_ratio"] = "18";
    };
    if (name == "fig2-low") {
        raw["species.0.shift_ratio"] = "0.05";
    } else if (name == "fig2-mid") {
        raw["species.0.shift_ratio"] = "2";
    } else if (name == "fig2-high") {
        raw["species.0.shift_ratio"] = "18";
    } else if (name == "fig3") {
        raw["species.0.shift_ratio"] = "18";
        raw["mode"] = "analytic-only";
    } else if (name == "fig4") {
        second_species();
    } else if (name == "fig5") {
        second_species();
        raw["mode"] = "pulse-delay";
        raw["source.fwhm"] = "50e-15";
        raw["source.carrier_detuning"] = "35";
    } else {
        std::string names;
        for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset `" + name + "`; valid presets: " + names);
    }
    return raw;
}

ScenarioConfig preset(const std::string& name) { return normalize_config(preset_raw(name)); }

}  // namespace dietsim
