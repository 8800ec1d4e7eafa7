#include "rydsim/estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "rydsim/dd_interaction.hpp"

namespace rydsim {

ValueWithError alpha_from_amplitudes(ValueWithError a1, ValueWithError a2) {
  if (!(a2.value > 0.0)) throw std::invalid_argument("alpha: A2 must be > 0");
  if (a1.value < 0.0) throw std::invalid_argument("alpha: A1 must be >= 0");
  const double alpha = a1.value / a2.value;
  if (alpha >= 1.0)
    throw InconsistentDataError("alpha >= 1: amplitudes inconsistent with the signal model");
  double rel2 = 0.0;
  if (a1.value > 0.0) rel2 += std::pow(a1.error / a1.value, 2);
  rel2 += std::pow(a2.error / a2.value, 2);
  return {alpha, alpha > 0.0 ? alpha * std::sqrt(rel2) : a1.error / a2.value};
}

ValueWithError beta_from_peak_integrals(std::span<const ValueWithError> integrals,
                                        std::vector<std::string>* warnings) {
  if (integrals.size() < 2) throw std::invalid_argument("beta: need at least two peak integrals");
  const auto& i1 = integrals[0];
  const auto& i2 = integrals[1];
  if (!(i1.value > 0.0)) throw std::invalid_argument("beta: single-atom peak integral must be > 0");
  if (i2.value < 0.0) throw std::invalid_argument("beta: peak integrals must be >= 0");
  const double ratio = i2.value / i1.value;
  double rel2 = std::pow(i1.error / i1.value, 2);
  if (i2.value > 0.0) rel2 += std::pow(i2.error / i2.value, 2);
  ValueWithError beta{2.0 * ratio,
                      i2.value > 0.0 ? 2.0 * ratio * std::sqrt(rel2) : 2.0 * i2.error / i1.value};

  // Poisson consistency of the higher peaks: I_{k+1}/I_k = beta/(k+1).
  for (std::size_t k = 1; k + 1 < integrals.size(); ++k) {
    const auto& a = integrals[k];
    const auto& b = integrals[k + 1];
    if (!(a.value > 0.0)) continue;
    const double expect = beta.value / static_cast<double>(k + 2);
    const double got = b.value / a.value;
    const double sigma = std::sqrt(std::pow(b.error / a.value, 2) +
                                   std::pow(got * a.error / a.value, 2) +
                                   std::pow(beta.error / static_cast<double>(k + 2), 2));
    if (sigma > 0.0 && std::abs(got - expect) > 3.0 * sigma && warnings)
      warnings->push_back("peak ratio I" + std::to_string(k + 2) + "/I" + std::to_string(k + 1) +
                          " deviates from the Poisson chain by more than 3 sigma");
  }
  return beta;
}

std::vector<ValueWithError> peak_integrals(const BinnedHistogram& hist,
                                           const HistogramModel& model) {
  std::vector<ValueWithError> out(model.windows.size());
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    const double center = hist.lo + (static_cast<double>(i) + 0.5) * hist.bin_width;
    const int n = assign_atom_number(center, model);
    if (n >= 1) out[n - 1].value += static_cast<double>(hist.counts[i]);
  }
  for (auto& v : out) v.error = std::sqrt(v.value);
  return out;
}

EstimateResult invert(ValueWithError alpha, ValueWithError beta) {
  if (!(alpha.value >= 0.0 && alpha.value < 1.0))
    throw std::invalid_argument("invert: alpha must be in [0,1)");
  if (beta.value < 0.0) throw std::invalid_argument("invert: beta must be >= 0");
  if (alpha.value == 0.0 && beta.value == 0.0)
    throw InconsistentDataError("invert: alpha = beta = 0 is indeterminate");

  EstimateResult r;
  r.alpha = alpha;
  r.beta = beta;
  const double om = 1.0 - alpha.value;
  const double nbar = alpha.value / om + beta.value;
  const double t = beta.value / nbar;
  if (t > 1.0) throw InconsistentDataError("invert: implied efficiency T > 1");

  const double dn_da = 1.0 / (om * om);
  const double dn_db = 1.0;
  const double nbar_err = std::hypot(dn_da * alpha.error, dn_db * beta.error);
  const double dt_da = -beta.value / (nbar * nbar) * dn_da;
  const double dt_db = (nbar - beta.value) / (nbar * nbar);
  const double t_err = std::hypot(dt_da * alpha.error, dt_db * beta.error);
  r.nbar = {nbar, nbar_err};
  r.efficiency = {t, t_err};
  return r;
}

ValueWithError rho2_from_signals(std::span<const ValueWithError> amplitudes,
                                 std::span<const int> atom_numbers, double nbar,
                                 double efficiency) {
  if (amplitudes.empty() || amplitudes.size() != atom_numbers.size())
    throw std::invalid_argument("rho2_from_signals: underdetermined or mismatched input");
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    const double x = static_cast<double>(atom_numbers[i] - 1) + nbar * (1.0 - efficiency);
    const double err = amplitudes[i].error;
    const double w = err > 0.0 ? 1.0 / (err * err) : 1.0;
    sxy += w * x * amplitudes[i].value;
    sxx += w * x * x;
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("rho2_from_signals: degenerate abscissas");
  return {sxy / sxx, 1.0 / std::sqrt(sxx)};
}

LineFit fit_line(std::span<const double> x, std::span<const ValueWithError> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
  double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i].error;
    const double w = e > 0.0 ? 1.0 / (e * e) : 1.0;
    sw += w;
    swx += w * x[i];
    swy += w * y[i].value;
    swxx += w * x[i] * x[i];
    swxy += w * x[i] * y[i].value;
  }
  const double det = sw * swxx - swx * swx;
  if (!(det > 0.0)) throw std::invalid_argument("fit_line: degenerate abscissas");
  LineFit f;
  f.slope.value = (sw * swxy - swx * swy) / det;
  f.intercept.value = (swxx * swy - swx * swxy) / det;
  f.slope.error = std::sqrt(sw / det);
  f.intercept.error = std::sqrt(swxx / det);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i].error;
    const double w = e > 0.0 ? 1.0 / (e * e) : 1.0;
    const double r = y[i].value - f.intercept.value - f.slope.value * x[i];
    f.chi2 += w * r * r;
  }
  return f;
}

double peak_model_value(PeakModel model, double x, double amplitude, double center, double fwhm,
                        double background) {
  const double dx = x - center;
  switch (model) {
    case PeakModel::sinc2: {
      const double u = 2.0 * sinc2_half_max_u * dx / fwhm;
      const double s = std::abs(u) < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u;
      return background + amplitude * s * s;
    }
    case PeakModel::lorentzian: {
      const double z = 2.0 * dx / fwhm;
      return background + amplitude / (1.0 + z * z);
    }
    case PeakModel::cusp:
      return background + amplitude * std::exp(-2.0 * std::log(2.0) * std::abs(dx) / fwhm);
  }
  return background;
}

namespace {

// 4x4 linear solve via Gaussian elimination with partial pivoting.
bool solve4(std::array<std::array<double, 4>, 4> a, std::array<double, 4>& b) {
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-300) return false;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (int r = c + 1; r < 4; ++r) {
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (int c = 3; c >= 0; --c) {
    for (int k = c + 1; k < 4; ++k) b[c] -= a[c][k] * b[k];
    b[c] /= a[c][c];
  }
  return true;
}

bool invert4(const std::array<std::array<double, 4>, 4>& a,
             std::array<std::array<double, 4>, 4>& inv) {
  for (int c = 0; c < 4; ++c) {
    std::array<double, 4> e{};
    e[c] = 1.0;
    auto copy = a;
    if (!solve4(copy, e)) return false;
    for (int r = 0; r < 4; ++r) inv[r][c] = e[r];
  }
  return true;
}

}  // namespace

PeakFit fit_peak(std::span<const double> x, std::span<const double> y,
                 std::span<const double> yerr, PeakModel model) {
  PeakFit out;
  const std::size_t n = x.size();
  if (n < 5 || y.size() != n || (!yerr.empty() && yerr.size() != n)) {
    out.diagnostics = "fit_peak: need >= 5 points with matching arrays";
    return out;
  }

  // Initial guesses from the data.
  std::size_t imax = 0;
  double ymin = y[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] > y[imax]) imax = i;
    ymin = std::min(ymin, y[i]);
  }
  std::array<double, 4> p{y[imax] - ymin, x[imax], 0.0, ymin};  // A, c, fwhm, b
  {
    const double half = ymin + 0.5 * p[0];
    double lo = x.front(), hi = x.back();
    for (std::size_t i = imax; i-- > 0;)
      if (y[i] < half) { lo = x[i]; break; }
    for (std::size_t i = imax + 1; i < n; ++i)
      if (y[i] < half) { hi = x[i]; break; }
    p[2] = std::max(hi - lo, (x.back() - x.front()) / static_cast<double>(n));
  }

  const auto weight = [&](std::size_t i) {
    if (yerr.empty()) return 1.0;
    return yerr[i] > 0.0 ? 1.0 / (yerr[i] * yerr[i]) : 0.0;
  };
  const auto chi2_of = [&](const std::array<double, 4>& q) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - peak_model_value(model, x[i], q[0], q[1], std::abs(q[2]), q[3]);
      c += weight(i) * r * r;
    }
    return c;
  };

  double chi2 = chi2_of(p);
  double lambda = 1e-3;
  std::array<std::array<double, 4>, 4> jtj{};
  std::array<double, 4> jtr{};
  const int max_iter = 200;
  int iter = 0;
  bool converged = false;
  for (; iter < max_iter; ++iter) {
    // Numeric Jacobian (central differences) and normal equations.
    for (auto& row : jtj) row.fill(0.0);
    jtr.fill(0.0);
    std::array<double, 4> step;
    for (int k = 0; k < 4; ++k) step[k] = std::max(1e-8, 1e-6 * std::abs(p[k]));
    for (std::size_t i = 0; i < n; ++i) {
      std::array<double, 4> g;
      for (int k = 0; k < 4; ++k) {
        auto hi = p, lo = p;
        hi[k] += step[k];
        lo[k] -= step[k];
        g[k] = (peak_model_value(model, x[i], hi[0], hi[1], std::abs(hi[2]), hi[3]) -
                peak_model_value(model, x[i], lo[0], lo[1], std::abs(lo[2]), lo[3])) /
               (2.0 * step[k]);
      }
      const double w = weight(i);
      const double r = y[i] - peak_model_value(model, x[i], p[0], p[1], std::abs(p[2]), p[3]);
      for (int a = 0; a < 4; ++a) {
        jtr[a] += w * g[a] * r;
        for (int b = 0; b < 4; ++b) jtj[a][b] += w * g[a] * g[b];
      }
    }
    auto damped = jtj;
    for (int k = 0; k < 4; ++k) damped[k][k] *= 1.0 + lambda;
    auto delta = jtr;
    if (!solve4(damped, delta)) {
      out.diagnostics = "fit_peak: singular normal equations";
      break;
    }
    std::array<double, 4> trial;
    for (int k = 0; k < 4; ++k) trial[k] = p[k] + delta[k];
    const double trial_chi2 = chi2_of(trial);
    if (trial_chi2 <= chi2) {
      const double rel = (chi2 - trial_chi2) / std::max(chi2, 1e-300);
      p = trial;
      chi2 = trial_chi2;
      lambda = std::max(lambda * 0.3, 1e-12);
      if (rel < 1e-12) {
        converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) {
        converged = true;  // stuck at a (local) minimum
        break;
      }
    }
  }

  p[2] = std::abs(p[2]);
  out.iterations = iter;
  out.chi2 = chi2;
  out.converged = converged;
  if (!converged && out.diagnostics.empty())
    out.diagnostics = "fit_peak: no convergence after " + std::to_string(max_iter) + " iterations";

  // Covariance from the final curvature.
  std::array<std::array<double, 4>, 4> cov{};
  std::array<double, 4> perr{};
  if (invert4(jtj, cov)) {
    double scale = 1.0;
    if (yerr.empty() && n > 4) scale = chi2 / static_cast<double>(n - 4);
    for (int k = 0; k < 4; ++k) perr[k] = cov[k][k] > 0.0 ? std::sqrt(cov[k][k] * scale) : 0.0;
  }
  out.amplitude = {p[0], perr[0]};
  out.center = {p[1], perr[1]};
  out.fwhm = {p[2], perr[2]};
  out.background = {p[3], perr[3]};
  return out;
}

}  // namespace rydsim
