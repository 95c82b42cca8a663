#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "dietsim/errors.hpp"
#include "dietsim/spectra.hpp"

using namespace dietsim;

namespace {

double lorentzian(double x, double x0, double w, double a, double b) {
    return a * w * w / ((x - x0) * (x - x0) + w * w) + b;
}

}  // namespace

TEST_CASE("exact Lorentzian is recovered") {
    std::vector<double> x, y;
    for (double d = -10.0; d <= 10.0; d += 0.125) {
        x.push_back(d);
        y.push_back(lorentzian(d, 0.37, 1.3, 0.08, 0.002));
    }
    const LorentzFit f = fit_lorentzian(x, y);
    CHECK(f.center == doctest::Approx(0.37).epsilon(1e-6));
    CHECK(f.half_width == doctest::Approx(1.3).epsilon(1e-6));
    CHECK(f.amplitude == doctest::Approx(0.08).epsilon(1e-6));
    CHECK(f.baseline == doctest::Approx(0.002).epsilon(1e-5));
    CHECK(f.residual_rms < 1e-10);
    CHECK_FALSE(f.poor_fit);
}

TEST_CASE("noisy Lorentzian gives a width within 3%") {
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<double> x, y;
    for (double d = -10.0; d <= 10.0; d += 0.125) {
        x.push_back(d);
        y.push_back(lorentzian(d, 0.0, 1.0, 1.0, 0.0) + noise(rng));
    }
    const LorentzFit f = fit_lorentzian(x, y);
    CHECK(f.half_width == doctest::Approx(1.0).epsilon(0.03));
    CHECK(std::abs(f.center) < 0.03);
    CHECK(std::sqrt(f.covariance[5]) < 0.03);
    CHECK(f.residual_rms == doctest::Approx(0.01).epsilon(0.2));
    CHECK_FALSE(f.poor_fit);
}

TEST_CASE("two separated peaks are not a Lorentzian") {
    std::vector<double> x, y;
    for (double d = -20.0; d <= 20.0; d += 0.125) {
        x.push_back(d);
        y.push_back(lorentzian(d, -6.0, 1.0, 1.0, 0.0) + lorentzian(d, 6.0, 1.0, 1.0, 0.0));
    }
    bool rejected = false;
    try {
        rejected = fit_lorentzian(x, y).poor_fit;
    } catch (const FitFailed&) {
        rejected = true;
    }
    CHECK(rejected);
}

TEST_CASE("fit input validation") {
    const std::vector<double> x{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(fit_lorentzian(x, std::vector<double>{1.0, 2.0}), AnalysisError);
    CHECK_THROWS_AS(fit_lorentzian(x, std::vector<double>{1.0, 2.0, 1.0}), AnalysisError);
}
