#include <algorithm>
#include <cmath>

#include "dietsim/kernels.hpp"

namespace dietsim::kernels {

void BlochCheck::merge(const BlochCheck& other) noexcept {
    trace_error = std::max(trace_error, other.trace_error);
    positivity_excess = std::max(positivity_excess, other.positivity_excess);
    min_excited = std::min(min_excited, other.min_excited);
    max_excited = std::max(max_excited, other.max_excited);
}

namespace {

struct Rhs {
    double d00, d11, dre, dim;
};

// Physical dipole coupling V = -hbar * rabi * (|0><1| + |1><0|) with
// rho01 = <0|rho|1>; Gamma returns population to |0>.
inline Rhs rhs(const BlochRates& p, double rabi, double r00, double r11, double re, double im) {
    Rhs k;
    k.d11 = ((-2.0 * rabi) * im) - p.decay * r11;
    k.d00 = -k.d11;
    k.dre = ((-p.omega01) * im) - p.gamma * re;
    k.dim = (p.omega01 * re + rabi * (r11 - r00)) - p.gamma * im;
    return k;
}

void curl_h(double* h, const double* e, std::size_t n, double coef) {
    for (std::size_t i = 0; i < n; ++i) h[i] -= coef * (e[i + 1] - e[i]);
}

void curl_e(double* e, const double* h, std::size_t begin, std::size_t end, double coef) {
    for (std::size_t i = begin; i < end; ++i) e[i] -= coef * (h[i] - h[i - 1]);
}

}  // namespace

namespace detail {

BlochCheck bloch_rk4_scalar(const BlochRates& p, BlochSoA s, const double* e_begin, const double* e_mid,
                            const double* e_end, std::size_t n, double dt) {
    const double half = 0.5 * dt;
    const double sixth = dt / 6.0;
    BlochCheck check;
    for (std::size_t i = 0; i < n; ++i) {
        const double r00 = s.rho00[i], r11 = s.rho11[i], re = s.re[i], im = s.im[i];
        const double w_b = p.rabi_per_field * e_begin[i];
        const double w_m = p.rabi_per_field * e_mid[i];
        const double w_e = p.rabi_per_field * e_end[i];

        const Rhs k1 = rhs(p, w_b, r00, r11, re, im);
        const Rhs k2 = rhs(p, w_m, r00 + half * k1.d00, r11 + half * k1.d11, re + half * k1.dre, im + half * k1.dim);
        const Rhs k3 = rhs(p, w_m, r00 + half * k2.d00, r11 + half * k2.d11, re + half * k2.dre, im + half * k2.dim);
        const Rhs k4 = rhs(p, w_e, r00 + dt * k3.d00, r11 + dt * k3.d11, re + dt * k3.dre, im + dt * k3.dim);

        const double n00 = r00 + sixth * ((k1.d00 + k4.d00) + 2.0 * (k2.d00 + k3.d00));
        const double n11 = r11 + sixth * ((k1.d11 + k4.d11) + 2.0 * (k2.d11 + k3.d11));
        const double nre = re + sixth * ((k1.dre + k4.dre) + 2.0 * (k2.dre + k3.dre));
        const double nim = im + sixth * ((k1.dim + k4.dim) + 2.0 * (k2.dim + k3.dim));
        s.rho00[i] = n00;
        s.rho11[i] = n11;
        s.re[i] = nre;
        s.im[i] = nim;

        check.trace_error = std::max(check.trace_error, std::abs((n00 + n11) - 1.0));
        check.positivity_excess = std::max(check.positivity_excess, (nre * nre + nim * nim) - n00 * n11);
        check.min_excited = std::min(check.min_excited, n11);
        check.max_excited = std::max(check.max_excited, n11);
    }
    return check;
}

}  // namespace detail

const KernelTable& scalar_kernels() noexcept {
    static const KernelTable table{"scalar", &curl_h, &curl_e, &detail::bloch_rk4_scalar};
    return table;
}

}  // namespace dietsim::kernels
