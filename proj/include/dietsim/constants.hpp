#pragma once

namespace dietsim {

/// SI constants (CODATA 2018). eps0 is derived from mu0 and c so that
/// c^2 * eps0 * mu0 == 1 to round-off.
struct PhysicalConstants {
    static constexpr double c = 299792458.0;
    static constexpr double mu0 = 1.25663706212e-6;
    static constexpr double eps0 = 1.0 / (mu0 * c * c);
    static constexpr double hbar = 1.054571817e-34;
    static constexpr double eta0 = mu0 * c;

    /// Atomic unit of electric dipole moment, e * a0.
    static constexpr double atomic_dipole = 1.602176634e-19 * 5.29177210903e-11;
};

using phys = PhysicalConstants;

inline constexpr double pi = 3.14159265358979323846;

}  // namespace dietsim
