#include "dietsim/kernels.hpp"

#if defined(DIETSIM_BUILD_AVX2) && defined(__AVX2__)

#include <immintrin.h>

#include <algorithm>

namespace dietsim::kernels {

namespace {

struct RhsV {
    __m256d d00, d11, dre, dim;
};

inline __m256d negate(__m256d x) { return _mm256_xor_pd(x, _mm256_set1_pd(-0.0)); }
inline __m256d vabs(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

// Mirrors rhs() in scalar.cpp operation for operation.
inline RhsV rhs(__m256d w01, __m256d neg_w01, __m256d gamma, __m256d decay, __m256d rabi, __m256d r00,
                __m256d r11, __m256d re, __m256d im) {
    const __m256d minus_two = _mm256_set1_pd(-2.0);
    RhsV k;
    k.d11 = _mm256_sub_pd(_mm256_mul_pd(_mm256_mul_pd(minus_two, rabi), im), _mm256_mul_pd(decay, r11));
    k.d00 = negate(k.d11);
    k.dre = _mm256_sub_pd(_mm256_mul_pd(neg_w01, im), _mm256_mul_pd(gamma, re));
    k.dim = _mm256_sub_pd(
        _mm256_add_pd(_mm256_mul_pd(w01, re), _mm256_mul_pd(rabi, _mm256_sub_pd(r11, r00))),
        _mm256_mul_pd(gamma, im));
    return k;
}

inline __m256d axpy(__m256d y, __m256d a, __m256d x) { return _mm256_add_pd(y, _mm256_mul_pd(a, x)); }

inline __m256d combine(__m256d y, __m256d sixth, __m256d k1, __m256d k2, __m256d k3, __m256d k4) {
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d sum = _mm256_add_pd(_mm256_add_pd(k1, k4), _mm256_mul_pd(two, _mm256_add_pd(k2, k3)));
    return _mm256_add_pd(y, _mm256_mul_pd(sixth, sum));
}

double hmax(__m256d v) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, v);
    return std::max(std::max(lane[0], lane[1]), std::max(lane[2], lane[3]));
}

double hmin(__m256d v) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, v);
    return std::min(std::min(lane[0], lane[1]), std::min(lane[2], lane[3]));
}

BlochCheck bloch_rk4_avx2(const BlochRates& p, BlochSoA s, const double* e_begin, const double* e_mid,
                          const double* e_end, std::size_t n, double dt) {
    const __m256d w01 = _mm256_set1_pd(p.omega01);
    const __m256d neg_w01 = _mm256_set1_pd(-p.omega01);
    const __m256d gamma = _mm256_set1_pd(p.gamma);
    const __m256d decay = _mm256_set1_pd(p.decay);
    const __m256d kappa = _mm256_set1_pd(p.rabi_per_field);
    const __m256d half = _mm256_set1_pd(0.5 * dt);
    const __m256d full = _mm256_set1_pd(dt);
    const __m256d sixth = _mm256_set1_pd(dt / 6.0);
    const __m256d one = _mm256_set1_pd(1.0);

    __m256d trace = _mm256_setzero_pd();
    __m256d positivity = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    __m256d lo = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256d hi = _mm256_set1_pd(-std::numeric_limits<double>::infinity());

    const std::size_t vec_end = n - n % 4;
    for (std::size_t i = 0; i < vec_end; i += 4) {
        const __m256d r00 = _mm256_loadu_pd(s.rho00 + i);
        const __m256d r11 = _mm256_loadu_pd(s.rho11 + i);
        const __m256d re = _mm256_loadu_pd(s.re + i);
        const __m256d im = _mm256_loadu_pd(s.im + i);
        const __m256d w_b = _mm256_mul_pd(kappa, _mm256_loadu_pd(e_begin + i));
        const __m256d w_m = _mm256_mul_pd(kappa, _mm256_loadu_pd(e_mid + i));
        const __m256d w_e = _mm256_mul_pd(kappa, _mm256_loadu_pd(e_end + i));

        const RhsV k1 = rhs(w01, neg_w01, gamma, decay, w_b, r00, r11, re, im);
        const RhsV k2 = rhs(w01, neg_w01, gamma, decay, w_m, axpy(r00, half, k1.d00), axpy(r11, half, k1.d11),
                            axpy(re, half, k1.dre), axpy(im, half, k1.dim));
        const RhsV k3 = rhs(w01, neg_w01, gamma, decay, w_m, axpy(r00, half, k2.d00), axpy(r11, half, k2.d11),
                            axpy(re, half, k2.dre), axpy(im, half, k2.dim));
        const RhsV k4 = rhs(w01, neg_w01, gamma, decay, w_e, axpy(r00, full, k3.d00), axpy(r11, full, k3.d11),
                            axpy(re, full, k3.dre), axpy(im, full, k3.dim));

        const __m256d n00 = combine(r00, sixth, k1.d00, k2.d00, k3.d00, k4.d00);
        const __m256d n11 = combine(r11, sixth, k1.d11, k2.d11, k3.d11, k4.d11);
        const __m256d nre = combine(re, sixth, k1.dre, k2.dre, k3.dre, k4.dre);
        const __m256d nim = combine(im, sixth, k1.dim, k2.dim, k3.dim, k4.dim);
        _mm256_storeu_pd(s.rho00 + i, n00);
        _mm256_storeu_pd(s.rho11 + i, n11);
        _mm256_storeu_pd(s.re + i, nre);
        _mm256_storeu_pd(s.im + i, nim);

        trace = _mm256_max_pd(trace, vabs(_mm256_sub_pd(_mm256_add_pd(n00, n11), one)));
        const __m256d coherence = _mm256_add_pd(_mm256_mul_pd(nre, nre), _mm256_mul_pd(nim, nim));
        positivity = _mm256_max_pd(positivity, _mm256_sub_pd(coherence, _mm256_mul_pd(n00, n11)));
        lo = _mm256_min_pd(lo, n11);
        hi = _mm256_max_pd(hi, n11);
    }

    BlochCheck check;
    check.trace_error = hmax(trace);
    check.positivity_excess = hmax(positivity);
    check.min_excited = hmin(lo);
    check.max_excited = hmax(hi);

    if (vec_end < n) {
        BlochSoA tail{s.rho00 + vec_end, s.rho11 + vec_end, s.re + vec_end, s.im + vec_end};
        check.merge(detail::bloch_rk4_scalar(p, tail, e_begin + vec_end, e_mid + vec_end, e_end + vec_end,
                                             n - vec_end, dt));
    }
    return check;
}

void curl_h_avx2(double* h, const double* e, std::size_t n, double coef) {
    const __m256d c = _mm256_set1_pd(coef);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(e + i + 1), _mm256_loadu_pd(e + i));
        _mm256_storeu_pd(h + i, _mm256_sub_pd(_mm256_loadu_pd(h + i), _mm256_mul_pd(c, diff)));
    }
    for (; i < n; ++i) h[i] -= coef * (e[i + 1] - e[i]);
}

void curl_e_avx2(double* e, const double* h, std::size_t begin, std::size_t end, double coef) {
    const __m256d c = _mm256_set1_pd(coef);
    std::size_t i = begin;
    for (; i + 4 <= end; i += 4) {
        const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(h + i), _mm256_loadu_pd(h + i - 1));
        _mm256_storeu_pd(e + i, _mm256_sub_pd(_mm256_loadu_pd(e + i), _mm256_mul_pd(c, diff)));
    }
    for (; i < end; ++i) e[i] -= coef * (h[i] - h[i - 1]);
}

}  // namespace

const KernelTable* avx2_kernels() noexcept {
    static const KernelTable table{"avx2", &curl_h_avx2, &curl_e_avx2, &bloch_rk4_avx2};
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &table : nullptr;
}

}  // namespace dietsim::kernels

#else

namespace dietsim::kernels {

const KernelTable* avx2_kernels() noexcept { return nullptr; }

}  // namespace dietsim::kernels

#endif
