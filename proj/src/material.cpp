#include "dietsim/material.hpp"

#include <cmath>
#include <string>

#include "dietsim/errors.hpp"

namespace dietsim {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw InvalidParameter(message);
}

}  // namespace

double EmitterSpecies::plasma_frequency() const noexcept {
    return std::sqrt(6.0 * omega01 * lorentz_shift());
}

double EmitterSpecies::coupling_dipole() const noexcept {
    return mu01 / std::sqrt(3.0);
}

void EmitterSpecies::validate() const {
    require(std::isfinite(omega01) && omega01 > 0.0, "species: omega01 must be positive");
    require(std::isfinite(mu01) && mu01 > 0.0, "species: mu01 must be positive");
    require(std::isfinite(Gamma) && Gamma >= 0.0, "species: Gamma must be non-negative");
    require(std::isfinite(gamma_star) && gamma_star >= 0.0,
            "species: gamma_star must be non-negative");
    require(std::isfinite(n0) && n0 >= 0.0, "species: n0 must be non-negative");
}

double total_decoherence(const EmitterSpecies& species) noexcept {
    return species.gamma();
}

double density_from_shift(double delta_target, double mu01) {
    require(std::isfinite(mu01) && mu01 > 0.0, "density_from_shift: mu01 must be positive");
    require(std::isfinite(delta_target) && delta_target >= 0.0,
            "density_from_shift: target shift must be non-negative");
    return 9.0 * phys::hbar * phys::eps0 * delta_target / (mu01 * mu01);
}

double reduced_detuning(double omega, const EmitterSpecies& reference) {
    const double gamma = reference.gamma();
    if (!(gamma > 0.0)) throw DegenerateDetuning("reduced detuning needs a reference with gamma > 0");
    return (omega - reference.omega01) / gamma;
}

double omega_from_detuning(double delta, const EmitterSpecies& reference) {
    const double gamma = reference.gamma();
    if (!(gamma > 0.0)) throw DegenerateDetuning("reduced detuning needs a reference with gamma > 0");
    return reference.omega01 + delta * gamma;
}

double omega_from_wavelength(double lambda) noexcept {
    return 2.0 * pi * phys::c / lambda;
}

void SlabMedium::validate() const {
    require(std::isfinite(thickness) && thickness > 0.0, "medium: thickness must be positive");
    require(std::isfinite(z_start), "medium: z_start must be finite");
    require(!species.empty() && species.size() <= 2, "medium: one or two species required");
    for (const auto& s : species) s.validate();
}

double SlabMedium::density_at(std::size_t index, double z) const {
    if (index >= species.size()) throw InvalidParameter("medium: species index out of range");
    return contains(z) ? species[index].n0 : 0.0;
}

}  // namespace dietsim
