#include "doctest.h"

#include <cmath>
#include <vector>

#include "dietsim/bloch.hpp"
#include "dietsim/constants.hpp"
#include "dietsim/errors.hpp"

using namespace dietsim;

namespace {

EmitterSpecies emitter(double Gamma, double gamma_star) {
    EmitterSpecies s;
    s.omega01 = omega_from_wavelength(620e-9);
    s.mu01 = phys::atomic_dipole;
    s.Gamma = Gamma;
    s.gamma_star = gamma_star;
    s.n0 = 1e26;
    return s;
}

// Field that gives a Rabi frequency rabi0 cos(omega t) for species s.
struct Drive {
    double amplitude, omega;
    double at(double t) const { return amplitude * std::cos(omega * t); }
};

DensityMatrixState integrate(DensityMatrixState st, const EmitterSpecies& s, const Drive& drive, double t_end,
                             std::size_t steps) {
    const double dt = t_end / static_cast<double>(steps);
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        st = advance_cell(st, s, drive.at(t), drive.at(t + 0.5 * dt), drive.at(t + dt), dt);
    }
    return st;
}

}  // namespace

TEST_CASE("bloch derivative") {
    const EmitterSpecies s = emitter(1e11, 1e12);
    const DensityMatrixState ground;
    const DensityMatrixState d0 = bloch_derivative(ground, 0.0, s);
    CHECK(d0.rho00 == 0.0);
    CHECK(d0.rho11 == 0.0);
    CHECK(d0.rho01_re == 0.0);
    CHECK(d0.rho01_im == 0.0);

    const DensityMatrixState excited{0.0, 1.0, 0.0, 0.0};
    const DensityMatrixState d1 = bloch_derivative(excited, 0.0, s);
    CHECK(d1.rho11 == -s.Gamma);
    CHECK(d1.rho00 == s.Gamma);

    const DensityMatrixState mixed{0.6, 0.4, 0.1, -0.2};
    const DensityMatrixState d2 = bloch_derivative(mixed, 3e12, s);
    CHECK(d2.rho00 + d2.rho11 == 0.0);
}

TEST_CASE("local field and rabi frequency") {
    CHECK(local_field(2.5, 0.0) == 2.5);
    CHECK(local_field(0.0, 3.0 * phys::eps0) == doctest::Approx(1.0).epsilon(1e-15));
    const EmitterSpecies s = emitter(1e11, 1e12);
    CHECK(rabi_frequency(1e5, s) == doctest::Approx(s.mu01 / std::sqrt(3.0) * 1e5 / phys::hbar).epsilon(1e-15));
}

TEST_CASE("population decay reaches 1/e at t = 1/Gamma") {
    const EmitterSpecies s = emitter(1e13, 0.0);
    const DensityMatrixState st = integrate({0.0, 1.0, 0.0, 0.0}, s, {0.0, 0.0}, 1.0 / s.Gamma, 20000);
    CHECK(std::abs(st.rho11 - std::exp(-1.0)) < 1e-6);
    CHECK(std::abs(st.rho00 + st.rho11 - 1.0) < 1e-12);
}

TEST_CASE("free coherence rotates at omega01 and decays at gamma") {
    const EmitterSpecies s = emitter(2e12, 3e12);
    const double t = 2e-13;
    const DensityMatrixState st = integrate({0.5, 0.5, 0.5, 0.0}, s, {0.0, 0.0}, t, 40000);
    const double envelope = 0.5 * std::exp(-s.gamma() * t);
    CHECK(st.rho01_re == doctest::Approx(envelope * std::cos(s.omega01 * t)).epsilon(1e-6));
    CHECK(st.rho01_im == doctest::Approx(envelope * std::sin(s.omega01 * t)).epsilon(1e-6));
}

TEST_CASE("RK4 error shrinks sixteenfold per halving") {
    const EmitterSpecies s = emitter(0.0, 0.0);
    const double rabi0 = s.omega01 / 100.0;
    const Drive drive{rabi0 * phys::hbar / s.coupling_dipole(), s.omega01};
    const double t_end = 400.0 / s.omega01;
    const std::size_t base = 2000;  // omega01 dt = 0.2
    const DensityMatrixState ref = integrate({}, s, drive, t_end, base * 64);
    double previous = 0.0;
    for (std::size_t factor : {1, 2, 4}) {
        const DensityMatrixState st = integrate({}, s, drive, t_end, base * factor);
        const double err = std::hypot(st.rho01_re - ref.rho01_re, st.rho01_im - ref.rho01_im, st.rho11 - ref.rho11);
        if (factor > 1) {
            const double ratio = previous / err;
            CHECK(ratio > 14.0);
            CHECK(ratio < 18.0);
        }
        previous = err;
    }
}

TEST_CASE("weak resonant drive reproduces two-level Rabi oscillations") {
    const EmitterSpecies s = emitter(0.0, 0.0);
    const double rabi0 = s.omega01 / 100.0;
    const double dt = 0.1 / s.omega01;

    for (double detuning_ratio : {0.0, 1.0}) {
        const double detuning = detuning_ratio * rabi0;
        const Drive drive{rabi0 * phys::hbar / s.coupling_dipole(), s.omega01 + detuning};
        const double generalized = std::hypot(rabi0, detuning);
        const double expected_max = rabi0 * rabi0 / (generalized * generalized);
        const auto steps = static_cast<std::size_t>(std::ceil(1.5 * pi / generalized / dt));
        DensityMatrixState st;
        double best = 0.0, t_best = 0.0;
        for (std::size_t n = 0; n < steps; ++n) {
            const double t = static_cast<double>(n) * dt;
            st = advance_cell(st, s, drive.at(t), drive.at(t + 0.5 * dt), drive.at(t + dt), dt);
            if (st.rho11 > best) {
                best = st.rho11;
                t_best = t + dt;
            }
        }
        CHECK(best == doctest::Approx(expected_max).epsilon(0.02));
        CHECK(t_best == doctest::Approx(pi / generalized).epsilon(0.02));
    }
}

TEST_CASE("weak drive is linear") {
    const EmitterSpecies s = emitter(1e11, 1e12);
    const double weak = 1e-3 * s.gamma() * phys::hbar / s.coupling_dipole();
    const double t_end = 3e-13;
    const DensityMatrixState one = integrate({}, s, {weak, s.omega01}, t_end, 30000);
    const DensityMatrixState two = integrate({}, s, {2.0 * weak, s.omega01}, t_end, 30000);
    CHECK(species_polarization(two, s) / species_polarization(one, s) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("invariant enforcement") {
    const EmitterSpecies s = emitter(1e11, 1e12);
    CHECK_THROWS_AS(advance_cell({}, s, 0.0, 0.0, 0.0, 1.0 / s.omega01), InvalidParameter);
    CHECK_THROWS_AS(advance_cell({}, s, 0.0, 0.0, 0.0, 0.0), InvalidParameter);
    CHECK_NOTHROW(check_invariants({0.7, 0.3, 0.2, 0.1}, 0, 0));
    try {
        check_invariants({0.5, 0.5, 0.6, 0.0}, 42, 7);
        FAIL("expected an invariant violation");
    } catch (const IntegratorInstability& e) {
        CHECK(e.cell() == 42);
        CHECK(e.step() == 7);
    }
    CHECK_THROWS_AS(check_invariants({0.5, 0.6, 0.0, 0.0}, 0, 0), IntegratorInstability);
    CHECK_THROWS_AS(check_invariants({1.1, -0.1, 0.0, 0.0}, 0, 0), IntegratorInstability);
    CHECK_THROWS_AS(check_invariants({std::nan(""), 0.0, 0.0, 0.0}, 0, 0), IntegratorInstability);
    // Strong drive keeps the invariants.
    const double strong = 0.05 * s.omega01 * phys::hbar / s.coupling_dipole();
    const DensityMatrixState st = integrate({}, s, {strong, s.omega01}, 2e-14, 4000);
    CHECK(std::abs(st.rho00 + st.rho11 - 1.0) < 1e-9);
}

TEST_CASE("polarization of a cell") {
    const EmitterSpecies s = emitter(1e11, 1e12);
    CHECK(species_polarization({}, s) == 0.0);
    const DensityMatrixState half{0.5, 0.5, 0.5, 0.0};
    CHECK(species_polarization(half, s) == doctest::Approx(s.n0 * s.coupling_dipole()).epsilon(1e-15));

    const std::vector<EmitterSpecies> pair{s, s};
    const std::vector<DensityMatrixState> opposite{{0.5, 0.5, 0.3, 0.0}, {0.5, 0.5, -0.3, 0.0}};
    const CellPolarization p = polarization_of_cell(opposite, pair);
    CHECK(p.total == 0.0);
    CHECK(p.partial[0] != 0.0);
    CHECK(p.partial[1] == -p.partial[0]);
    CHECK_THROWS_AS(polarization_of_cell(opposite, std::vector<EmitterSpecies>{s}), InvalidParameter);
}
