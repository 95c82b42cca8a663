#include "dietsim/bloch.hpp"

#include <cmath>
#include <string>

#include "dietsim/errors.hpp"

namespace dietsim {

DensityMatrixState bloch_derivative(const DensityMatrixState& st, double rabi, const EmitterSpecies& s) {
    DensityMatrixState d;
    d.rho11 = -2.0 * rabi * st.rho01_im - s.Gamma * st.rho11;
    d.rho00 = -d.rho11;
    d.rho01_re = -s.omega01 * st.rho01_im - s.gamma() * st.rho01_re;
    d.rho01_im = s.omega01 * st.rho01_re + rabi * (st.rho11 - st.rho00) - s.gamma() * st.rho01_im;
    return d;
}

double local_field(double e_macroscopic, double p_total) noexcept {
    return e_macroscopic + p_total / (3.0 * phys::eps0);
}

double rabi_frequency(double e_local, const EmitterSpecies& s) noexcept {
    return s.coupling_dipole() * e_local / phys::hbar;
}

kernels::BlochRates bloch_rates(const EmitterSpecies& s) noexcept {
    return {s.omega01, s.gamma(), s.Gamma, s.coupling_dipole() / phys::hbar};
}

void enforce_invariants(const kernels::BlochCheck& check, std::size_t cell, std::uint64_t step) {
    if (!(check.trace_error <= trace_tolerance))
        throw IntegratorInstability(cell, step, "trace error " + std::to_string(check.trace_error));
    if (!(check.positivity_excess <= positivity_tolerance))
        throw IntegratorInstability(cell, step, "|rho01|^2 exceeds rho00 rho11 by "
                                                    + std::to_string(check.positivity_excess));
    if (!(check.min_excited >= -positivity_tolerance) || !(check.max_excited <= 1.0 + positivity_tolerance))
        throw IntegratorInstability(cell, step, "excited population outside [0, 1]");
}

void check_invariants(const DensityMatrixState& st, std::size_t cell, std::uint64_t step) {
    kernels::BlochCheck check;
    check.trace_error = std::abs(st.rho00 + st.rho11 - 1.0);
    check.positivity_excess = st.rho01_re * st.rho01_re + st.rho01_im * st.rho01_im - st.rho00 * st.rho11;
    check.min_excited = st.rho11;
    check.max_excited = st.rho11;
    enforce_invariants(check, cell, step);
}

DensityMatrixState advance_cell(const DensityMatrixState& state, const EmitterSpecies& s, double e_local_begin,
                                double e_local_mid, double e_local_end, double dt, std::size_t cell,
                                std::uint64_t step) {
    if (!(dt > 0.0) || s.omega01 * dt > 0.2)
        throw InvalidParameter("advance_cell: time step must satisfy 0 < omega01 dt <= 0.2");
    DensityMatrixState next = state;
    kernels::BlochSoA view{&next.rho00, &next.rho11, &next.rho01_re, &next.rho01_im};
    const kernels::BlochCheck check = kernels::scalar_kernels().bloch_rk4(
        bloch_rates(s), view, &e_local_begin, &e_local_mid, &e_local_end, 1, dt);
    enforce_invariants(check, cell, step);
    return next;
}

double species_polarization(const DensityMatrixState& state, const EmitterSpecies& s) noexcept {
    return 2.0 * s.n0 * s.coupling_dipole() * state.rho01_re;
}

CellPolarization polarization_of_cell(std::span<const DensityMatrixState> states,
                                      std::span<const EmitterSpecies> species) {
    if (states.size() != species.size())
        throw InvalidParameter("polarization_of_cell: states and species lists differ in length");
    CellPolarization out;
    out.partial.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        out.partial.push_back(species_polarization(states[i], species[i]));
        out.total += out.partial.back();
    }
    return out;
}

}  // namespace dietsim
