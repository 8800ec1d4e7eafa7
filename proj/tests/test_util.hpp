#pragma once

// Shared test-side oracles, kept independent of the library paths they
// check.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace testutil {

// Regularized incomplete gamma Q(a, x) (series / continued fraction).
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
  if (x == 0.0) return 1.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    // P by series, Q = 1 - P.
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
  }
  // Q by Lentz continued fraction.
  double b = x + 1.0 - a;
  double c = 1e300;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - gln) * h;
}

// p-value of a chi-square statistic with df degrees of freedom.
inline double chi_square_p(double stat, int df) {
  return gamma_q(0.5 * static_cast<double>(df), 0.5 * stat);
}

// Exhaustive enumeration of every excitation pattern of n0 atoms and every
// detection pattern of the excited subset.  rho[i] is the absolute per-atom
// transfer population for i excited atoms (index 0 unused).
struct BruteForce {
  std::vector<double> detected_pmf;    // index: detected N
  std::vector<double> transferred;     // n_N(37P), Z pulses
  std::vector<double> remaining;       // n_N(37S)+n_N(36P)
  std::vector<double> signal;          // S_N; NaN where empty
};

inline BruteForce brute_force(int n0, double p, double t, const std::vector<double>& rho, long z) {
  BruteForce r;
  r.detected_pmf.assign(n0 + 1, 0.0);
  r.transferred.assign(n0 + 1, 0.0);
  r.remaining.assign(n0 + 1, 0.0);
  const std::uint32_t masks = 1u << n0;
  for (std::uint32_t excited = 0; excited < masks; ++excited) {
    const int i = __builtin_popcount(excited);
    const double pe = std::pow(p, i) * std::pow(1.0 - p, n0 - i);
    // Every detection sub-pattern of the excited set.
    for (std::uint32_t det = excited;; det = (det - 1) & excited) {
      const int d = __builtin_popcount(det);
      const double pd = std::pow(t, d) * std::pow(1.0 - t, i - d);
      const double w = pe * pd;
      r.detected_pmf[d] += w;
      if (d > 0 && i >= 1) {
        const double rho_i = rho.at(i);
        r.transferred[d] += static_cast<double>(z) * w * d * rho_i;
        r.remaining[d] += static_cast<double>(z) * w * d * (1.0 - rho_i);
      }
      if (det == 0) break;
    }
  }
  r.signal.assign(n0 + 1, std::nan(""));
  for (int n = 1; n <= n0; ++n) {
    const double total = r.transferred[n] + r.remaining[n];
    if (total > 0.0) r.signal[n] = r.transferred[n] / total;
  }
  return r;
}

}  // namespace testutil
