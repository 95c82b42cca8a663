#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "dietsim/errors.hpp"
#include "dietsim/spectra.hpp"

namespace dietsim {

namespace {

using Vec4 = Eigen::Vector4d;


void residuals(const Vec4& p, std::span<const double> x, std::span<const double> y, Eigen::VectorXd& r,
               Eigen::MatrixXd* jac) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = x[i] - p[0];
        const double w2 = p[1] * p[1];
        const double den = u * u + w2;
        const Eigen::Index k = static_cast<Eigen::Index>(i);
        r[k] = p[2] * w2 / den + p[3] - y[i];
        if (jac) {
            (*jac)(k, 0) = 2.0 * p[2] * w2 * u / (den * den);
            (*jac)(k, 1) = 2.0 * p[2] * p[1] * u * u / (den * den);
            (*jac)(k, 2) = w2 / den;
            (*jac)(k, 3) = 1.0;
        }
    }
}

Vec4 initial_guess(std::span<const double> x, std::span<const double> y) {
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const std::size_t peak = static_cast<std::size_t>(hi - y.begin());
    const double base = *lo;
    const double half = base + 0.5 * (*hi - base);
    std::size_t left = peak, right = peak;
    while (left > 0 && y[left] > half) --left;
    while (right + 1 < y.size() && y[right] > half) ++right;
    double w = 0.5 * (x[right] - x[left]);
    if (!(w > 0.0)) w = 0.1 * (x.back() - x.front());
    return {x[peak], w, *hi - base, base};
}

}  // namespace

LorentzFit fit_lorentzian(std::span<const double> x, std::span<const double> y, int max_iterations) {
    if (x.size() != y.size() || x.size() < 5) throw FitFailed("fit_lorentzian needs at least 5 samples", 0.0);
    const auto m = static_cast<Eigen::Index>(x.size());
    Vec4 p = initial_guess(x, y);
    Eigen::VectorXd r(m), r_trial(m);
    Eigen::MatrixXd jac(m, 4);
    residuals(p, x, y, r, &jac);
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    bool converged = false;
    int it = 0;
    for (; it < max_iterations && !converged; ++it) {
        const Eigen::Matrix4d jtj = jac.transpose() * jac;
        const Vec4 grad = jac.transpose() * r;
        bool accepted = false;
        while (!accepted && lambda < 1e16) {
            Eigen::Matrix4d a = jtj;
            a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
            const Vec4 step = a.ldlt().solve(-grad);
            const Vec4 trial = p + step;
            residuals(trial, x, y, r_trial, nullptr);
            const double trial_cost = r_trial.squaredNorm();
            if (std::isfinite(trial_cost) && trial_cost <= cost) {
                const double change = step.cwiseAbs().cwiseQuotient(trial.cwiseAbs().cwiseMax(1e-300)).maxCoeff();
                const double gain = cost - trial_cost;
                p = trial;
                cost = trial_cost;
                residuals(p, x, y, r, &jac);
                lambda = std::max(lambda * 0.3, 1e-12);
                accepted = true;
                if (change < 1e-12 || gain <= 1e-15 * cost) converged = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!accepted) converged = true;  // no downhill step left: at a minimum to round-off
    }
    const double rms = std::sqrt(cost / static_cast<double>(m));
    if (!converged || !p.allFinite())
        throw FitFailed("Lorentzian fit did not converge in " + std::to_string(max_iterations) + " iterations", rms);

    LorentzFit fit;
    fit.center = p[0];
    fit.half_width = std::abs(p[1]);
    fit.amplitude = p[2];
    fit.baseline = p[3];
    fit.residual_rms = rms;
    fit.iterations = it;
    const double dof = static_cast<double>(std::max<Eigen::Index>(m - 4, 1));
    const Eigen::Matrix4d cov = (jac.transpose() * jac).inverse() * (cost / dof);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) fit.covariance[static_cast<std::size_t>(4 * i + j)] = cov(i, j);
    fit.poor_fit = rms > 0.03 * std::abs(fit.amplitude);
    return fit;
}

}  // namespace dietsim
