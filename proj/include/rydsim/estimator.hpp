#pragma once

#include <span>
#include <string>
#include <vector>

#include "rydsim/detector_model.hpp"

namespace rydsim {

struct ValueWithError {
  double value = 0.0;
  double error = 0.0;
};

// Inverted experimental parameters with first-order propagated
// uncertainties.
struct EstimateResult {
  ValueWithError alpha;       // resonant amplitude ratio (S1-rho1)/(S2-rho1)
  ValueWithError beta;        // mean detected atoms per pulse, nbar*T
  ValueWithError nbar;        // mean excited atoms per pulse
  ValueWithError efficiency;  // absolute detection efficiency T
  ValueWithError rho2res;     // two-atom resonant peak amplitude (when fitted)
  std::vector<std::string> warnings;
};

struct InconsistentDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// alpha = A1 / A2 from the background-subtracted peak amplitudes.
ValueWithError alpha_from_amplitudes(ValueWithError a1, ValueWithError a2);

// beta = 2 * I2 / I1 from the single- and two-atom peak integrals.  Further
// integrals, when given, are checked against the Poisson ratio chain
// I_{k+1}/I_k = beta/(k+1); inconsistencies beyond 3 sigma add a warning.
ValueWithError beta_from_peak_integrals(std::span<const ValueWithError> integrals,
                                        std::vector<std::string>* warnings = nullptr);

// Peak integrals of a binned pulse-height histogram over the model windows,
// with Poisson counting errors.
std::vector<ValueWithError> peak_integrals(const BinnedHistogram& hist,
                                           const HistogramModel& model);

// nbar = alpha/(1-alpha) + beta,  T = beta/nbar.
EstimateResult invert(ValueWithError alpha, ValueWithError beta);

// Weighted least-squares slope of A_N versus [N - 1 + nbar(1-T)] through the
// origin; this is the two-atom resonant amplitude under the linear scaling
// rule.
ValueWithError rho2_from_signals(std::span<const ValueWithError> amplitudes,
                                 std::span<const int> atom_numbers, double nbar,
                                 double efficiency);

// Weighted straight-line fit y = intercept + slope * x.
struct LineFit {
  ValueWithError slope;
  ValueWithError intercept;
  double chi2 = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const ValueWithError> y);

// --- single-peak nonlinear fitting ---

enum class PeakModel { sinc2, lorentzian, cusp };

struct PeakFit {
  ValueWithError amplitude;
  ValueWithError center;
  ValueWithError fwhm;
  ValueWithError background;
  bool converged = false;
  int iterations = 0;
  double chi2 = 0.0;
  std::string diagnostics;
};

double peak_model_value(PeakModel model, double x, double amplitude, double center, double fwhm,
                        double background);

// Levenberg-Marquardt least squares; `yerr` may be empty (unit weights, with
// the covariance rescaled by the reduced chi-square).
PeakFit fit_peak(std::span<const double> x, std::span<const double> y,
                 std::span<const double> yerr, PeakModel model);

}  // namespace rydsim
