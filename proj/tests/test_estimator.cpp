#include <doctest.h>

#include <cmath>
#include <vector>

#include "rydsim/constants.hpp"
#include "rydsim/estimator.hpp"
#include "rydsim/rng.hpp"

using namespace rydsim;

TEST_CASE("alpha from amplitudes") {
  const auto a = alpha_from_amplitudes({0.075, 0.0}, {0.095, 0.0});
  CHECK(a.value == doctest::Approx(0.075 / 0.095).epsilon(1e-12));
  CHECK(a.error == doctest::Approx(0.0));

  // Propagated error: (a1/a2) sqrt((e1/a1)^2 + (e2/a2)^2).
  const auto b = alpha_from_amplitudes({0.08, 0.004}, {0.10, 0.01});
  const double expect = 0.8 * std::sqrt(std::pow(0.004 / 0.08, 2) + std::pow(0.01 / 0.10, 2));
  CHECK(b.error == doctest::Approx(expect).epsilon(1e-9));

  CHECK_THROWS_AS(alpha_from_amplitudes({0.2, 0.0}, {0.1, 0.0}), InconsistentDataError);
  CHECK_THROWS_AS(alpha_from_amplitudes({0.1, 0.0}, {0.1, 0.0}), InconsistentDataError);
}

TEST_CASE("beta from peak integrals") {
  // beta = 2 I2 / I1.
  std::vector<ValueWithError> two = {{1000.0, 0.0}, {300.0, 0.0}};
  CHECK(beta_from_peak_integrals(two).value == doctest::Approx(0.6).epsilon(1e-12));

  // Consistent Poisson chain I_k ~ beta^k / k! adds no warnings.
  const double beta = 0.6;
  std::vector<ValueWithError> chain;
  double term = 1e6;
  for (int k = 1; k <= 4; ++k) {
    term *= beta / k;
    chain.push_back({term, std::sqrt(term)});
  }
  std::vector<std::string> warnings;
  const auto est = beta_from_peak_integrals(chain, &warnings);
  CHECK(est.value == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(warnings.empty());

  // A grossly inconsistent third peak gets flagged.
  chain[2].value *= 4.0;
  beta_from_peak_integrals(chain, &warnings);
  CHECK(!warnings.empty());

  std::vector<ValueWithError> empty_first = {{0.0, 0.0}, {10.0, 3.0}};
  CHECK_THROWS_AS(beta_from_peak_integrals(empty_first), std::invalid_argument);
}

TEST_CASE("inversion of alpha and beta") {
  // The worked example: alpha = 0.075/0.095, beta = 0.6.
  const auto r = invert({0.075 / 0.095, 0.0}, {0.6, 0.0});
  CHECK(r.nbar.value == doctest::Approx(4.35).epsilon(1e-12));
  CHECK(r.efficiency.value == doctest::Approx(0.6 / 4.35).epsilon(1e-12));
  CHECK(r.efficiency.value == doctest::Approx(0.138).epsilon(0.005));

  // Round trip from known physics: nbar = 3, T = 0.25.
  const double nbar = 3.0, t = 0.25;
  const double beta = nbar * t;
  const double alpha = (nbar - beta) / (1.0 + nbar - beta);
  const auto rt = invert({alpha, 0.0}, {beta, 0.0});
  CHECK(rt.nbar.value == doctest::Approx(nbar).epsilon(1e-12));
  CHECK(rt.efficiency.value == doctest::Approx(t).epsilon(1e-12));

  // Degenerate or out-of-domain combinations.
  CHECK_THROWS_AS(invert({0.0, 0.0}, {0.0, 0.0}), InconsistentDataError);
  CHECK_THROWS_AS(invert({1.2, 0.0}, {0.5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(invert({0.5, 0.0}, {-0.1, 0.0}), std::invalid_argument);
}

TEST_CASE("inversion error propagation against finite differences") {
  const double alpha = 0.55, beta = 0.8;
  const double ea = 0.02, eb = 0.05;
  const auto r = invert({alpha, ea}, {beta, eb});

  const auto nbar_of = [](double a, double b) { return a / (1.0 - a) + b; };
  const auto t_of = [&](double a, double b) { return b / nbar_of(a, b); };
  const double h = 1e-7;
  const double dn_da = (nbar_of(alpha + h, beta) - nbar_of(alpha - h, beta)) / (2 * h);
  const double dn_db = 1.0;
  const double dt_da = (t_of(alpha + h, beta) - t_of(alpha - h, beta)) / (2 * h);
  const double dt_db = (t_of(alpha, beta + h) - t_of(alpha, beta - h)) / (2 * h);

  CHECK(r.nbar.error ==
        doctest::Approx(std::hypot(dn_da * ea, dn_db * eb)).epsilon(1e-5));
  CHECK(r.efficiency.error ==
        doctest::Approx(std::hypot(dt_da * ea, dt_db * eb)).epsilon(1e-5));
}

TEST_CASE("two-atom amplitude from the signal set") {
  const double nbar = 2.0, t = 0.5, rho2 = 0.02;
  std::vector<ValueWithError> amps;
  std::vector<int> atoms = {1, 2, 3, 4};
  for (int n : atoms) amps.push_back({rho2 * (n - 1 + nbar * (1.0 - t)), 1e-4});
  const auto est = rho2_from_signals(amps, atoms, nbar, t);
  CHECK(est.value == doctest::Approx(rho2).epsilon(1e-9));
  CHECK(est.error > 0.0);
}

TEST_CASE("weighted line fit") {
  std::vector<double> x = {0.0, 1.0, 2.0, 3.0, 4.0};
  std::vector<ValueWithError> y;
  for (double xi : x) y.push_back({1.5 + 0.7 * xi, 0.1});
  const auto fit = fit_line(x, y);
  CHECK(fit.slope.value == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(fit.intercept.value == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(fit.chi2 == doctest::Approx(0.0).epsilon(1e-12));

  // Known closed form for the two-point case.
  std::vector<double> x2 = {1.0, 3.0};
  std::vector<ValueWithError> y2 = {{2.0, 0.5}, {8.0, 0.5}};
  const auto f2 = fit_line(x2, y2);
  CHECK(f2.slope.value == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f2.intercept.value == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("peak models") {
  CHECK(peak_model_value(PeakModel::sinc2, 5.0, 2.0, 5.0, 1.0, 0.3) ==
        doctest::Approx(2.3).epsilon(1e-12));
  // Half maximum at center +- fwhm/2 for all models.
  for (auto model : {PeakModel::sinc2, PeakModel::lorentzian, PeakModel::cusp}) {
    const double half = peak_model_value(model, 5.0 + 0.5 * 2.0, 2.0, 5.0, 2.0, 0.0);
    CHECK(half == doctest::Approx(1.0).epsilon(1e-6));
    const double sym = peak_model_value(model, 5.0 - 0.7, 2.0, 5.0, 2.0, 0.1);
    CHECK(sym == doctest::Approx(peak_model_value(model, 5.0 + 0.7, 2.0, 5.0, 2.0, 0.1))
                     .epsilon(1e-12));
  }
}

TEST_CASE("peak fit recovers synthetic parameters") {
  RandomStream rng(99, 0);
  const double amp = 0.08, center = 0.3e6 * constants::two_pi, fwhm = 1.8e6 * constants::two_pi;
  const double bg = 0.012, noise = 0.002;
  std::vector<double> x, y, yerr;
  for (int i = -20; i <= 20; ++i) {
    const double xi = i * 0.3e6 * constants::two_pi;
    x.push_back(xi);
    y.push_back(peak_model_value(PeakModel::sinc2, xi, amp, center, fwhm, bg) +
                noise * rng.normal());
    yerr.push_back(noise);
  }
  const auto fit = fit_peak(x, y, yerr, PeakModel::sinc2);
  CHECK(fit.converged);
  CHECK(std::abs(fit.amplitude.value - amp) < 4.0 * fit.amplitude.error);
  CHECK(std::abs(fit.center.value - center) < 4.0 * fit.center.error);
  CHECK(std::abs(fit.fwhm.value - fwhm) < 4.0 * fit.fwhm.error);
  CHECK(std::abs(fit.background.value - bg) < 4.0 * fit.background.error);
  CHECK(fit.amplitude.error < 0.1 * amp);

  // Unweighted path: exact noiseless data must be reproduced closely.
  std::vector<double> clean;
  for (double xi : x) clean.push_back(peak_model_value(PeakModel::cusp, xi, amp, center, fwhm, bg));
  const auto exact = fit_peak(x, clean, {}, PeakModel::cusp);
  CHECK(exact.converged);
  CHECK(exact.amplitude.value == doctest::Approx(amp).epsilon(1e-5));
  CHECK(exact.fwhm.value == doctest::Approx(fwhm).epsilon(1e-4));
}
