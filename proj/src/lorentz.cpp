#include "dietsim/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dietsim/errors.hpp"

namespace dietsim {

namespace {

// f(omega) with the 1/Delta scaling folded out; callers divide by Delta.
cplx shifted_denominator(double omega, const EmitterSpecies& s, double delta) {
    const double w01 = s.omega01;
    return {w01 * w01 - 2.0 * w01 * delta - omega * omega, -2.0 * s.gamma() * omega};
}

double detuning_or_nan(double omega, const EmitterSpecies& reference) {
    return reference.gamma() > 0.0 ? reduced_detuning(omega, reference)
                                   : std::numeric_limits<double>::quiet_NaN();
}

double real_index(double omega, const SlabMedium& medium) {
    return refractive_index(chi_medium(omega, medium)).real();
}

}  // namespace

cplx chi_single(double omega, const EmitterSpecies& s) {
    const double delta = s.lorentz_shift();
    if (delta == 0.0) return {0.0, 0.0};
    const cplx f = shifted_denominator(omega, s, delta) / delta;
    return 6.0 * s.omega01 / f;
}

cplx chi_mixture(double omega, const EmitterSpecies& s, const EmitterSpecies& s2) {
    const double delta = s.lorentz_shift();
    const double delta2 = s2.lorentz_shift();
    if (delta2 == 0.0) return chi_single(omega, s);
    if (delta == 0.0) return chi_single(omega, s2);

    const double w1 = s.omega01;
    const double w2 = s2.omega01;
    const cplx f = shifted_denominator(omega, s, delta) / delta;
    const cplx f2 = shifted_denominator(omega, s2, delta2) / delta2;
    // Written so that exchanging the species is bit-exact.
    const cplx numerator = 6.0 * w2 * (f + 2.0 * w1) + 6.0 * w1 * (f2 + 2.0 * w2);
    const cplx denominator = f * f2 - 4.0 * (w1 * w2);
    return numerator / denominator;
}

cplx chi_medium(double omega, const SlabMedium& medium) {
    switch (medium.species.size()) {
    case 1:
        return chi_single(omega, medium.species[0]);
    case 2:
        return chi_mixture(omega, medium.species[0], medium.species[1]);
    default:
        throw InvalidParameter("chi_medium: one or two species required");
    }
}

cplx refractive_index(cplx chi) {
    cplx n = std::sqrt(1.0 + chi);
    if (n.imag() < 0.0) n = -n;
    return n;
}

double transparency_frequency(const EmitterSpecies& s, const EmitterSpecies& s2) {
    const EmitterSpecies& lo = s.omega01 <= s2.omega01 ? s : s2;
    const EmitterSpecies& hi = s.omega01 <= s2.omega01 ? s2 : s;
    const double a = lo.omega01 * lo.lorentz_shift();
    const double b = hi.omega01 * hi.lorentz_shift();
    if (!(a + b > 0.0)) throw InvalidParameter("transparency_frequency: both species have zero density");
    const double w_sq = (a * hi.omega01 * hi.omega01 + b * lo.omega01 * lo.omega01) / (a + b);
    return std::sqrt(w_sq);
}

double transparency_frequency_numeric(const EmitterSpecies& s, const EmitterSpecies& s2) {
    const double lo = std::min(s.omega01, s2.omega01);
    const double hi = std::max(s.omega01, s2.omega01);
    if (!(hi > lo)) throw InvalidParameter("transparency_frequency_numeric: transitions coincide");

    auto magnitude = [&](double w) { return std::abs(chi_mixture(w, s, s2)); };

    // |chi| has poles inside the interval, so bracket the global minimum first.
    constexpr int scan_points = 4000;
    const double step = (hi - lo) / scan_points;
    int best = 0;
    double best_value = magnitude(lo);
    for (int i = 1; i <= scan_points; ++i) {
        const double value = magnitude(lo + i * step);
        if (value < best_value) {
            best_value = value;
            best = i;
        }
    }
    double a = lo + std::max(best - 1, 0) * step;
    double b = lo + std::min(best + 1, scan_points) * step;

    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = magnitude(c);
    double fd = magnitude(d);
    for (int iter = 0; iter < 200 && (b - a) > 1e-13 * hi; ++iter) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = magnitude(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = magnitude(d);
        }
    }
    return 0.5 * (a + b);
}

FrequencyWindow reflection_window(const EmitterSpecies& s) {
    const double w01 = s.omega01;
    const double delta = s.lorentz_shift();
    const double low_sq = w01 * w01 - 2.0 * w01 * delta;
    if (!(low_sq > 0.0))
        throw DegenerateMedium("reflection_window: omega01^2 - 2 omega01 Delta <= 0, density too high for the model");
    return {std::sqrt(low_sq), std::sqrt(w01 * w01 + 4.0 * w01 * delta)};
}

double interface_reflectance(double n) {
    const double r = (1.0 - n) / (1.0 + n);
    return r * r;
}

double interface_reflectance(double omega, const EmitterSpecies& s) {
    return interface_reflectance(refractive_index(chi_single(omega, s)).real());
}

SlabCoefficients slab_coefficients(double omega, cplx n, double thickness) {
    const cplx r12 = (1.0 - n) / (1.0 + n);
    const cplx r23 = -r12;
    const cplx t12 = 2.0 / (1.0 + n);
    const cplx t23 = 2.0 * n / (1.0 + n);
    const cplx phase = std::exp(cplx(0.0, 1.0) * n * (omega * thickness / phys::c));
    const cplx phase_sq = phase * phase;
    const cplx denominator = 1.0 + r12 * r23 * phase_sq;
    return {t12 * t23 * phase / denominator, (r12 + r23 * phase_sq) / denominator};
}

SpectrumResult slab_spectra(std::span<const double> omega_grid, const SlabMedium& medium) {
    medium.validate();
    for (std::size_t i = 1; i < omega_grid.size(); ++i)
        if (!(omega_grid[i] > omega_grid[i - 1]))
            throw InvalidParameter("slab_spectra: omega grid must be strictly increasing");

    SpectrumResult out;
    const EmitterSpecies& reference = medium.species.front();
    for (double w : omega_grid) {
        const cplx n = refractive_index(chi_medium(w, medium));
        const SlabCoefficients coeff = slab_coefficients(w, n, medium.thickness);
        out.push_back(w, detuning_or_nan(w, reference), std::norm(coeff.t), std::norm(coeff.r));
    }
    return out;
}

std::vector<double> resonance_poles(const SlabMedium& medium) {
    std::vector<double> poles;
    auto shifted_sq = [](const EmitterSpecies& s) {
        return s.omega01 * s.omega01 - 2.0 * s.omega01 * s.lorentz_shift();
    };
    const auto& sp = medium.species;
    if (sp.size() == 1 || (sp.size() == 2 && sp[1].lorentz_shift() == 0.0)) {
        if (sp[0].lorentz_shift() > 0.0 && shifted_sq(sp[0]) > 0.0) poles.push_back(std::sqrt(shifted_sq(sp[0])));
        return poles;
    }
    if (sp[0].lorentz_shift() == 0.0) {
        if (sp[1].lorentz_shift() > 0.0 && shifted_sq(sp[1]) > 0.0) poles.push_back(std::sqrt(shifted_sq(sp[1])));
        return poles;
    }
    // (a - x)(b - x) = 4 w01 w01' D D' with x = omega^2.
    const double a = shifted_sq(sp[0]);
    const double b = shifted_sq(sp[1]);
    const double k = 4.0 * sp[0].omega01 * sp[1].omega01 * sp[0].lorentz_shift() * sp[1].lorentz_shift();
    const double half_sum = 0.5 * (a + b);
    const double disc = std::sqrt(0.25 * (a - b) * (a - b) + k);
    for (double x : {half_sum - disc, half_sum + disc})
        if (x > 0.0) poles.push_back(std::sqrt(x));
    return poles;
}

double group_index(double omega, const SlabMedium& medium) {
    const EmitterSpecies& reference = medium.species.front();
    double h = reference.gamma() > 0.0 ? reference.gamma() / 100.0 : omega * 1e-6;

    bool lossless = true;
    for (const auto& s : medium.species) lossless = lossless && s.gamma() == 0.0 && s.n0 > 0.0;
    if (lossless) {
        for (double pole : resonance_poles(medium))
            if (std::abs(pole - omega) <= h)
                throw DerivativeUnreliable("group_index: difference stencil straddles a pole of chi");
    }

    const double n = real_index(omega, medium);
    auto derivative = [&](double step) {
        return (real_index(omega + step, medium) - real_index(omega - step, medium)) / (2.0 * step);
    };
    double previous = derivative(h);
    for (int halving = 0; halving < 40; ++halving) {
        h *= 0.5;
        const double current = derivative(h);
        const double ng = n + omega * current;
        if (std::abs(omega * (current - previous)) <= 1e-6 * std::max(std::abs(ng), 1.0)) return ng;
        previous = current;
    }
    throw DerivativeUnreliable("group_index: finite differences did not converge");
}

double band_averaged_group_index(std::span<const double> omega, std::span<const double> weight,
                                 const SlabMedium& medium) {
    if (omega.size() != weight.size() || omega.empty())
        throw InvalidParameter("band_averaged_group_index: grid and weights must match");
    double sum = 0.0;
    double total = 0.0;
    double skipped = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i) {
        if (!(weight[i] > 0.0)) continue;
        total += weight[i];
        try {
            sum += weight[i] * group_index(omega[i], medium);
        } catch (const DerivativeUnreliable&) {
            skipped += weight[i];
        }
    }
    if (!(total > 0.0)) throw InvalidParameter("band_averaged_group_index: zero total weight");
    if (skipped > 0.01 * total)
        throw DerivativeUnreliable("band_averaged_group_index: unreliable derivative over too much of the band");
    return sum / (total - skipped);
}

OpticalResponse optical_response(double omega, const SlabMedium& medium) {
    OpticalResponse out;
    out.omega = omega;
    out.n_complex = refractive_index(chi_medium(omega, medium));
    out.reflectance = interface_reflectance(out.n_complex.real());
    try {
        out.group_index = group_index(omega, medium);
    } catch (const DerivativeUnreliable&) {
        out.group_index = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

}  // namespace dietsim
