#pragma once

// Data-parallel inner loops of the solver. Every kernel has a scalar
// reference implementation; SIMD variants perform the same floating-point
// operations in the same order and are bit-identical to it (the project
// builds with -ffp-contract=off and the vector code uses no FMA).

#include <cstddef>
#include <limits>
#include <string_view>

namespace dietsim::kernels {

/// Per-species constants of the Bloch right-hand side.
struct BlochRates {
    double omega01 = 0.0;
    double gamma = 0.0;           ///< coherence damping
    double decay = 0.0;           ///< excited-state population decay Gamma
    double rabi_per_field = 0.0;  ///< projected dipole / hbar, (rad/s) per (V/m)
};

/// Structure-of-arrays view of n density matrices.
struct BlochSoA {
    double* rho00 = nullptr;
    double* rho11 = nullptr;
    double* re = nullptr;  ///< Re[rho01]
    double* im = nullptr;  ///< Im[rho01]
};

/// Invariant diagnostics gathered while advancing a block of cells.
struct BlochCheck {
    double trace_error = 0.0;  ///< max |rho00 + rho11 - 1|
    double positivity_excess = -std::numeric_limits<double>::infinity();  ///< max |rho01|^2 - rho00 rho11
    double min_excited = std::numeric_limits<double>::infinity();
    double max_excited = -std::numeric_limits<double>::infinity();

    void merge(const BlochCheck& other) noexcept;
};

/// One classical RK4 step of the optical Bloch equations for n cells with
/// local fields given at the step start, midpoint and end.
using BlochRk4Fn = BlochCheck (*)(const BlochRates& rates, BlochSoA state, const double* e_begin,
                                  const double* e_mid, const double* e_end, std::size_t n, double dt);

/// h[i] -= coef * (e[i + 1] - e[i]) for i in [0, n).
using CurlHFn = void (*)(double* h, const double* e, std::size_t n, double coef);

/// e[i] -= coef * (h[i] - h[i - 1]) for i in [begin, end).
using CurlEFn = void (*)(double* e, const double* h, std::size_t begin, std::size_t end, double coef);

struct KernelTable {
    const char* name;
    CurlHFn curl_h;
    CurlEFn curl_e;
    BlochRk4Fn bloch_rk4;
};

const KernelTable& scalar_kernels() noexcept;

/// nullptr when the build or the running CPU lacks AVX2.
const KernelTable* avx2_kernels() noexcept;

/// "auto" picks the widest available variant; "scalar" and "avx2" force one
/// (falling back to scalar when AVX2 is unavailable).
const KernelTable& select_kernels(std::string_view preference);

/// select_kernels() honoring the DIETSIM_KERNELS environment variable.
const KernelTable& default_kernels();

namespace detail {
// Scalar tail shared by vector variants so the remainder rounds identically.
BlochCheck bloch_rk4_scalar(const BlochRates& rates, BlochSoA state, const double* e_begin,
                            const double* e_mid, const double* e_end, std::size_t n, double dt);
}  // namespace detail

}  // namespace dietsim::kernels
