#include "dietsim/fdtd.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "dietsim/bloch.hpp"
#include "dietsim/errors.hpp"
#include "dietsim/lorentz.hpp"

namespace dietsim {

namespace {

std::size_t cells(double length, double dz) {
    return static_cast<std::size_t>(std::llround(length / dz));
}

}  // namespace

void Grid1D::validate() const {
    if (!(dz > 0.0)) throw InvalidParameter("grid: dz must be positive");
    if (!(courant > 0.0 && courant <= 1.0)) throw InvalidParameter("grid: Courant number must lie in (0, 1]");
    if (!(dt > 0.0)) throw InvalidParameter("grid: dt must be positive");
    if (nz < 4) throw InvalidParameter("grid: at least four nodes required");
    if (slab_begin > slab_end || slab_end > nz - 1)
        throw InvalidParameter("grid: slab range outside the interior");
    if (slab_end > slab_begin && slab_begin < 1) throw InvalidParameter("grid: slab touches the boundary");
}

Layout make_layout(const SlabMedium& medium, double dz, const LayoutMargins& margins) {
    if (!(dz > 0.0)) throw InvalidParameter("layout: dz must be positive");
    Layout out;
    out.reflection_probe = cells(margins.reflection_probe, dz);
    out.injection = cells(margins.injection, dz);
    out.slab_begin = cells(medium.z_start, dz);
    out.slab_end = out.slab_begin + cells(medium.thickness, dz);
    out.transmission_probe = out.slab_end + cells(margins.transmission_gap, dz);
    out.nz = out.transmission_probe + cells(margins.right_gap, dz) + 1;
    if (!(out.reflection_probe >= 1 && out.reflection_probe < out.injection && out.injection < out.slab_begin))
        throw InvalidParameter("layout: need boundary < reflection probe < injection < slab");
    if (out.slab_end <= out.slab_begin) throw InvalidParameter("layout: slab thinner than one cell");
    if (out.transmission_probe + 1 >= out.nz - 1) throw InvalidParameter("layout: transmission probe too close to the boundary");
    return out;
}

Grid1D make_grid(const Layout& layout, double dz, double courant) {
    Grid1D grid;
    grid.dz = dz;
    grid.courant = courant;
    grid.dt = courant * dz / phys::c;
    grid.nz = layout.nz;
    grid.slab_begin = layout.slab_begin;
    grid.slab_end = layout.slab_end;
    grid.validate();
    return grid;
}

double max_index_magnitude(const SlabMedium& medium, double omega_lo, double omega_hi) {
    constexpr int samples = 20000;
    double best = 1.0;
    for (int i = 0; i <= samples; ++i) {
        const double w = omega_lo + (omega_hi - omega_lo) * i / samples;
        best = std::max(best, std::abs(refractive_index(chi_medium(w, medium))));
    }
    return best;
}

double resolving_cell_size(const SlabMedium& medium, double dz_max, double omega_lo, double omega_hi) {
    const double shortest_wavelength = 2.0 * pi * phys::c / omega_hi;
    const double limit = shortest_wavelength / (40.0 * max_index_magnitude(medium, omega_lo, omega_hi));
    const double target = std::min(dz_max, limit);
    const double count = std::ceil(medium.thickness / target - 1e-9);
    return medium.thickness / count;
}

// ---- stages -----------------------------------------------------------------

void update_h(SimulationState& state, const Grid1D& grid, const kernels::KernelTable& k) {
    k.curl_h(state.h_y.data(), state.e_x.data(), grid.nz - 1, grid.dt / (phys::mu0 * grid.dz));
}

void update_e(SimulationState& state, const Grid1D& grid, std::span<const double> delta_p,
              const kernels::KernelTable& k) {
    k.curl_e(state.e_x.data(), state.h_y.data(), 1, grid.nz - 1, grid.dt / (phys::eps0 * grid.dz));
    if (delta_p.empty()) return;
    if (delta_p.size() != grid.nz) throw InvalidParameter("update_e: delta_p must cover the grid");
    for (std::size_t i = 1; i + 1 < grid.nz; ++i) state.e_x[i] -= delta_p[i] / phys::eps0;
}

void inject_source_h(SimulationState& state, const Grid1D& grid, const IncidentWave& wave, double t_n) {
    // h[inj - 1] is scattered-field but its curl sees the total field at inj.
    const std::size_t inj = wave.spec().injection_cell;
    state.h_y[inj - 1] += grid.dt / (phys::mu0 * grid.dz) * wave.e_at(t_n);
}

void inject_source_e(SimulationState& state, const Grid1D& grid, const IncidentWave& wave, double t_half) {
    const std::size_t inj = wave.spec().injection_cell;
    state.e_x[inj] += grid.dt / (phys::eps0 * grid.dz) * wave.h_upstream(t_half);
}

void MurBoundary::capture(const SimulationState& state) noexcept {
    const std::size_t n = state.e_x.size();
    left0_ = state.e_x[0];
    left1_ = state.e_x[1];
    right0_ = state.e_x[n - 1];
    right1_ = state.e_x[n - 2];
}

void MurBoundary::apply(SimulationState& state, const Grid1D& grid) const noexcept {
    const double k = (grid.courant - 1.0) / (grid.courant + 1.0);
    const std::size_t n = grid.nz;
    state.e_x[0] = left1_ + k * (state.e_x[1] - left0_);
    state.e_x[n - 1] = right1_ + k * (state.e_x[n - 2] - right0_);
}

double discrete_energy(std::span<const double> e, std::span<const double> h_before,
                       std::span<const double> h_after, double dz) {
    double we = 0.0;
    for (double v : e) we += v * v;
    double wh = 0.0;
    for (std::size_t i = 0; i < h_before.size(); ++i) wh += h_before[i] * h_after[i];
    return 0.5 * dz * (phys::eps0 * we + phys::mu0 * wh);
}

// ---- Simulation ---------------------------------------------------------------

SpeciesState::SpeciesState(std::size_t n)
    : rho00(n, 1.0), rho11(n, 0.0), re(n, 0.0), im(n, 0.0), p(n, 0.0), p_prev(n, 0.0), p_prev2(n, 0.0),
      e_local(n, 0.0) {}

Simulation::Simulation(SimulationSetup setup)
    : setup_(std::move(setup)),
      kernels_(setup_.options.kernels ? setup_.options.kernels : &kernels::default_kernels()) {
    const Grid1D& g = setup_.grid;
    g.validate();
    if (setup_.species.size() > 2) throw InvalidParameter("simulation: at most two species");
    if (setup_.options.decimation == 0) throw InvalidParameter("simulation: decimation must be >= 1");
    if (setup_.options.invariant_check_interval == 0 || setup_.options.nan_check_interval == 0)
        throw InvalidParameter("simulation: check intervals must be >= 1");
    for (const auto& s : setup_.species) {
        s.validate();
        if (s.omega01 * g.dt > 0.2) throw InvalidParameter("simulation: omega01 dt exceeds 0.2, refine the grid");
        if (s.plasma_frequency() * g.dt > 0.2)
            throw InvalidParameter("simulation: plasma frequency times dt exceeds 0.2, refine the grid");
        rates_.push_back(bloch_rates(s));
    }
    if (!setup_.species.empty() && g.slab_size() == 0)
        throw InvalidParameter("simulation: species given but the slab is empty");

    if (setup_.source) {
        const std::size_t inj = setup_.source->injection_cell;
        if (inj < 2 || inj + 1 >= g.nz) throw InvalidParameter("simulation: injection node outside the grid");
        if (g.slab_size() > 0 && inj >= g.slab_begin)
            throw InvalidParameter("simulation: injection node must lie left of the slab");
        wave_.emplace(*setup_.source, g.dz, g.dt);
    }
    if (setup_.pinned_node && *setup_.pinned_node >= g.nz) throw InvalidParameter("simulation: pinned node outside the grid");

    const double dt_sample = static_cast<double>(setup_.options.decimation) * g.dt;
    for (std::size_t cell : setup_.probes) {
        if (cell < 1 || cell + 1 >= g.nz) throw InvalidParameter("simulation: probe outside the interior");
        ProbeRecording rec;
        rec.cell = cell;
        rec.dt_sample = dt_sample;
        rec.t_first = dt_sample;
        rec.h_offset = -0.5 * g.dt;
        recordings_.push_back(std::move(rec));
    }

    state_.e_x.assign(g.nz, 0.0);
    state_.h_y.assign(g.nz - 1, 0.0);
    state_.p_x.assign(g.nz, 0.0);
    const std::size_t n = g.slab_size();
    for (std::size_t s = 0; s < setup_.species.size(); ++s) state_.species.emplace_back(n);

    e_star_.assign(n, 0.0);
    sum_now_.assign(n, 0.0);
    sum_pred_.assign(n, 0.0);
    sum_new_.assign(n, 0.0);
    p_pred_.assign(setup_.species.size(), std::vector<double>(n, 0.0));
    e_end_ = p_pred_;
    e_mid_ = p_pred_;
    if (setup_.options.predictor == Predictor::bloch) predictor_scratch_ = SpeciesState(n);
    stats_.kernel = kernels_->name;
}

void Simulation::step() {
    const Grid1D& g = setup_.grid;
    const kernels::KernelTable& k = *kernels_;
    const double t_n = state_.clock;
    const Boundary boundary = setup_.options.boundary;

    mur_.capture(state_);
    update_h(state_, g, k);
    if (wave_) inject_source_h(state_, g, *wave_, t_n);

    k.curl_e(state_.e_x.data(), state_.h_y.data(), 1, g.nz - 1, g.dt / (phys::eps0 * g.dz));
    if (boundary == Boundary::periodic) {
        state_.e_x[0] -= g.dt / (phys::eps0 * g.dz) * (state_.h_y[0] - state_.h_y[g.nz - 2]);
        state_.e_x[g.nz - 1] = state_.e_x[0];
    }
    if (wave_) inject_source_e(state_, g, *wave_, t_n + 0.5 * g.dt);

    if (!setup_.species.empty())
        advance_medium(std::span<const double>(state_.e_x.data() + g.slab_begin, g.slab_size()));

    if (setup_.pinned_node) state_.e_x[*setup_.pinned_node] = 0.0;
    if (boundary == Boundary::mur) {
        mur_.apply(state_, g);
    } else if (boundary == Boundary::pec) {
        state_.e_x[0] = 0.0;
        state_.e_x[g.nz - 1] = 0.0;
    }

    ++state_.step;
    state_.clock = static_cast<double>(state_.step) * g.dt;
    ++stats_.steps;

    if (state_.step % setup_.options.decimation == 0) record_probes();
    if (state_.step % setup_.options.nan_check_interval == 0) check_finite();
}

void Simulation::advance_medium(std::span<const double> e_star_view) {
    const Grid1D& g = setup_.grid;
    const kernels::KernelTable& k = *kernels_;
    const std::size_t n = g.slab_size();
    const std::size_t ns = setup_.species.size();
    const bool mutual = setup_.options.coupling == Coupling::mutual;
    constexpr double inv_eps0 = 1.0 / phys::eps0;
    constexpr double inv_3eps0 = 1.0 / (3.0 * phys::eps0);

    std::copy(e_star_view.begin(), e_star_view.end(), e_star_.begin());

    std::fill(sum_now_.begin(), sum_now_.end(), 0.0);
    std::fill(sum_pred_.begin(), sum_pred_.end(), 0.0);
    for (std::size_t s = 0; s < ns; ++s) {
        SpeciesState& sp = state_.species[s];
        std::vector<double>& pred = p_pred_[s];
        if (setup_.options.predictor == Predictor::extrapolate) {
            for (std::size_t j = 0; j < n; ++j) pred[j] = 3.0 * sp.p[j] - 3.0 * sp.p_prev[j] + sp.p_prev2[j];
        } else {
            predictor_scratch_.rho00 = sp.rho00;
            predictor_scratch_.rho11 = sp.rho11;
            predictor_scratch_.re = sp.re;
            predictor_scratch_.im = sp.im;
            k.bloch_rk4(rates_[s], predictor_scratch_.view(), sp.e_local.data(), sp.e_local.data(),
                        sp.e_local.data(), n, g.dt);
            const double factor = 2.0 * setup_.species[s].n0 * setup_.species[s].coupling_dipole();
            for (std::size_t j = 0; j < n; ++j) pred[j] = factor * predictor_scratch_.re[j];
        }
        for (std::size_t j = 0; j < n; ++j) {
            sum_now_[j] += sp.p[j];
            sum_pred_[j] += pred[j];
        }
    }

    const bool check_now = (state_.step + 1) % setup_.options.invariant_check_interval == 0;
    for (std::size_t s = 0; s < ns; ++s) {
        SpeciesState& sp = state_.species[s];
        const std::vector<double>& pred = p_pred_[s];
        std::vector<double>& e_end = e_end_[s];
        std::vector<double>& e_mid = e_mid_[s];
        for (std::size_t j = 0; j < n; ++j) {
            const double own = mutual ? sum_pred_[j] : pred[j];
            e_end[j] = e_star_[j] - (sum_pred_[j] - sum_now_[j]) * inv_eps0 + own * inv_3eps0;
            e_mid[j] = 0.5 * (sp.e_local[j] + e_end[j]);
        }
        const kernels::BlochCheck check =
            k.bloch_rk4(rates_[s], sp.view(), sp.e_local.data(), e_mid.data(), e_end.data(), n, g.dt);
        stats_.bloch.merge(check);
        if (check_now) {
            ++stats_.invariant_checks;
            try {
                enforce_invariants(check, g.slab_begin, state_.step + 1);
            } catch (const IntegratorInstability&) {
                locate_invariant_violation(s);
                throw;
            }
        }

        std::swap(sp.p_prev2, sp.p_prev);
        std::swap(sp.p_prev, sp.p);
        const double factor = 2.0 * setup_.species[s].n0 * setup_.species[s].coupling_dipole();
        for (std::size_t j = 0; j < n; ++j) sp.p[j] = factor * sp.re[j];
    }

    std::fill(sum_new_.begin(), sum_new_.end(), 0.0);
    for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t j = 0; j < n; ++j) sum_new_[j] += state_.species[s].p[j];

    double* e = state_.e_x.data() + g.slab_begin;
    double* p_x = state_.p_x.data() + g.slab_begin;
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = e_star_[j] - (sum_new_[j] - sum_now_[j]) * inv_eps0;
        p_x[j] = sum_new_[j];
    }
    for (std::size_t s = 0; s < ns; ++s) {
        SpeciesState& sp = state_.species[s];
        for (std::size_t j = 0; j < n; ++j) sp.e_local[j] = e[j] + (mutual ? sum_new_[j] : sp.p[j]) * inv_3eps0;
    }
}

void Simulation::locate_invariant_violation(std::size_t species) const {
    const SpeciesState& sp = state_.species[species];
    for (std::size_t j = 0; j < sp.rho00.size(); ++j) {
        DensityMatrixState st{sp.rho00[j], sp.rho11[j], sp.re[j], sp.im[j]};
        check_invariants(st, setup_.grid.slab_begin + j, state_.step + 1);
    }
}

void Simulation::run_steps(std::uint64_t count) {
    for (std::uint64_t i = 0; i < count; ++i) step();
}

void Simulation::run_until(double t) {
    const double dt = setup_.grid.dt;
    const auto target = static_cast<std::uint64_t>(std::ceil(t / dt - 1e-9));
    while (state_.step < target) step();
}

void Simulation::record_probes() {
    for (ProbeRecording& rec : recordings_) {
        rec.e.push_back(state_.e_x[rec.cell]);
        rec.h.push_back(0.5 * (state_.h_y[rec.cell - 1] + state_.h_y[rec.cell]));
    }
}

void Simulation::check_finite() const {
    for (double v : state_.e_x)
        if (!std::isfinite(v)) throw SimulationDiverged(state_.step);
    for (double v : state_.h_y)
        if (!std::isfinite(v)) throw SimulationDiverged(state_.step);
}

double Simulation::field_energy() const {
    double we = 0.0;
    for (double v : state_.e_x) we += v * v;
    double wh = 0.0;
    for (double v : state_.h_y) wh += v * v;
    return 0.5 * setup_.grid.dz * (phys::eps0 * we + phys::mu0 * wh);
}

}  // namespace dietsim
