#pragma once

// 1D Yee-staggered Maxwell solver for E_x(z) and H_y(z) coupled to the
// Bloch dynamics of a slab of emitters.
//
// E lives on integer nodes z = i dz at integer times, H on half-integer nodes
// at half-integer times. A slab cell i represents [z_i - dz/2, z_i + dz/2),
// so a slab of N nodes has thickness exactly N dz.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "dietsim/kernels.hpp"
#include "dietsim/material.hpp"
#include "dietsim/probe.hpp"
#include "dietsim/source.hpp"

namespace dietsim {

struct Grid1D {
    double dz = 1e-9;
    double dt = 0.0;
    double courant = 0.5;
    std::size_t nz = 0;
    std::size_t slab_begin = 0;  ///< first slab node
    std::size_t slab_end = 0;    ///< one past the last slab node

    std::size_t slab_size() const noexcept { return slab_end - slab_begin; }
    double z(std::size_t node) const noexcept { return static_cast<double>(node) * dz; }

    void validate() const;
};

/// Node indices of every feature along the line, left to right.
struct Layout {
    std::size_t reflection_probe = 0;
    std::size_t injection = 0;
    std::size_t slab_begin = 0;
    std::size_t slab_end = 0;
    std::size_t transmission_probe = 0;
    std::size_t nz = 0;
};

/// Physical placement of the probes and the source (metres).
struct LayoutMargins {
    double reflection_probe = 20e-9;
    double injection = 40e-9;
    double transmission_gap = 50e-9;  ///< slab end to transmission probe
    double right_gap = 50e-9;         ///< transmission probe to boundary
};

Layout make_layout(const SlabMedium& medium, double dz, const LayoutMargins& margins = {});
Grid1D make_grid(const Layout& layout, double dz, double courant);

/// Largest dz <= dz_max that divides the slab thickness into whole cells and
/// resolves the shortest in-medium wavelength with 40 cells, judging max|n|
/// from the analytic susceptibility over [omega_lo, omega_hi].
double resolving_cell_size(const SlabMedium& medium, double dz_max, double omega_lo, double omega_hi);

/// max |n(omega)| of the analytic medium on [omega_lo, omega_hi].
double max_index_magnitude(const SlabMedium& medium, double omega_lo, double omega_hi);

/// Which polarization drives a species' local field.
enum class Coupling {
    mutual,       ///< E + (P + P') / (3 eps0)
    independent,  ///< E + P_own / (3 eps0); species do not see each other
};

/// How P at the end of a step is estimated before the field update.
enum class Predictor {
    extrapolate,  ///< quadratic extrapolation of the polarization history
    bloch,        ///< a full RK4 pass with the local field frozen at the step start
};

enum class Boundary {
    mur,       ///< first-order Mur absorbing ends
    pec,       ///< E pinned to zero at both ends
    periodic,  ///< node nz-1 identified with node 0
};

struct EngineOptions {
    Coupling coupling = Coupling::mutual;
    Boundary boundary = Boundary::mur;
    Predictor predictor = Predictor::extrapolate;
    std::uint64_t invariant_check_interval = 1;
    std::uint64_t nan_check_interval = 1000;
    std::size_t decimation = 1;
    const kernels::KernelTable* kernels = nullptr;  ///< nullptr: default_kernels()
};

struct SimulationSetup {
    Grid1D grid;
    std::vector<EmitterSpecies> species;  ///< uniform over the slab nodes; empty for vacuum
    std::optional<SourceSpec> source;
    std::vector<std::size_t> probes;
    std::optional<std::size_t> pinned_node;  ///< E forced to zero (perfect mirror)
    EngineOptions options;
};

struct SpeciesState {
    std::vector<double> rho00, rho11, re, im;
    std::vector<double> p;        ///< partial polarization at the current step
    std::vector<double> p_prev;   ///< one step back
    std::vector<double> p_prev2;  ///< two steps back
    std::vector<double> e_local;  ///< local field at the current step

    explicit SpeciesState(std::size_t n = 0);
    kernels::BlochSoA view() noexcept { return {rho00.data(), rho11.data(), re.data(), im.data()}; }
};

struct SimulationState {
    std::vector<double> e_x;  ///< nz integer nodes
    std::vector<double> h_y;  ///< nz - 1 half-integer nodes, h_y[i] at i + 1/2
    std::vector<double> p_x;  ///< total polarization on the E nodes
    std::vector<SpeciesState> species;
    std::uint64_t step = 0;
    double clock = 0.0;
};

struct RunStats {
    kernels::BlochCheck bloch;
    std::uint64_t steps = 0;
    std::uint64_t invariant_checks = 0;
    const char* kernel = "";
};

// ---- individual update stages --------------------------------------------

/// H^{n+1/2} = H^{n-1/2} - dt / (mu0 dz) (E_{i+1} - E_i).
void update_h(SimulationState& state, const Grid1D& grid, const kernels::KernelTable& k);

/// E^{n+1} = E^n - dt / (eps0 dz) (H_{i+1/2} - H_{i-1/2}) - delta_p / eps0 on
/// interior nodes. delta_p is either empty or nz long.
void update_e(SimulationState& state, const Grid1D& grid, std::span<const double> delta_p,
              const kernels::KernelTable& k);

/// Total-field/scattered-field corrections at the injection node.
void inject_source_h(SimulationState& state, const Grid1D& grid, const IncidentWave& wave, double t_n);
void inject_source_e(SimulationState& state, const Grid1D& grid, const IncidentWave& wave, double t_half);

/// First-order Mur boundaries at both grid ends. capture() must see the
/// fields before the E update of the step, apply() after it.
class MurBoundary {
public:
    void capture(const SimulationState& state) noexcept;
    void apply(SimulationState& state, const Grid1D& grid) const noexcept;

private:
    double left0_ = 0.0, left1_ = 0.0, right0_ = 0.0, right1_ = 0.0;
};

/// Exactly conserved discrete energy of the lossless leapfrog scheme,
/// (eps0 |E^n|^2 + mu0 H^{n-1/2} . H^{n+1/2}) dz / 2.
double discrete_energy(std::span<const double> e, std::span<const double> h_before,
                       std::span<const double> h_after, double dz);

// ---- the coupled solver ---------------------------------------------------

class Simulation {
public:
    explicit Simulation(SimulationSetup setup);

    /// One leapfrog cycle: H update, TFSF, E update with the polarization
    /// current, Bloch advance of every slab cell, boundaries, probes.
    void step();
    void run_steps(std::uint64_t count);
    void run_until(double t);

    const SimulationState& state() const noexcept { return state_; }
    SimulationState& mutable_state() noexcept { return state_; }
    const Grid1D& grid() const noexcept { return setup_.grid; }
    const SimulationSetup& setup() const noexcept { return setup_; }
    const std::vector<ProbeRecording>& recordings() const noexcept { return recordings_; }
    const RunStats& stats() const noexcept { return stats_; }
    const kernels::KernelTable& kernels() const noexcept { return *kernels_; }

    /// Electromagnetic energy per unit area, (eps0 E^2 + mu0 H^2)/2 dz summed
    /// over the grid (H taken at its current half step).
    double field_energy() const;

private:
    void advance_medium(std::span<const double> e_star);
    void record_probes();
    void check_finite() const;
    void locate_invariant_violation(std::size_t species) const;

    SimulationSetup setup_;
    const kernels::KernelTable* kernels_;
    std::optional<IncidentWave> wave_;
    SimulationState state_;
    MurBoundary mur_;
    std::vector<kernels::BlochRates> rates_;
    std::vector<ProbeRecording> recordings_;
    RunStats stats_;

    // per-step scratch, slab length
    std::vector<double> e_star_, sum_now_, sum_pred_, sum_new_;
    std::vector<std::vector<double>> p_pred_, e_end_, e_mid_;
    SpeciesState predictor_scratch_;
};

// ---- checkpoints ------------------------------------------------------------

/// Flat little-endian dump: magic "DIETCKPT", u32 version, u32 reserved,
/// u64 nz, u64 slab size, u64 species count, u64 step, f64 clock, f64 dz,
/// f64 dt, then f64 arrays e_x[nz], h_y[nz-1], p_x[nz] and for each species
/// p, p_prev, p_prev2, e_local, rho00, rho11, re, im (slab size each).
inline constexpr std::uint32_t checkpoint_version = 1;

void write_checkpoint(const SimulationState& state, const Grid1D& grid, const std::filesystem::path& path);

/// Reads a checkpoint into a state whose shape must match `grid` and
/// `species_count`; throws InvalidParameter on any mismatch.
SimulationState read_checkpoint(const std::filesystem::path& path, const Grid1D& grid, std::size_t species_count);

}  // namespace dietsim
