#include "rydsim/statistics.hpp"

#include <cmath>
#include <limits>

namespace rydsim {

ExcitationModel ExcitationModel::weak(double nbar) {
  if (!(nbar >= 0.0)) throw std::invalid_argument("weak excitation: nbar must be >= 0");
  ExcitationModel m;
  m.regime = Regime::weak;
  m.nbar = nbar;
  return m;
}

ExcitationModel ExcitationModel::strong(long atoms_total, double p) {
  if (atoms_total < 1) throw std::invalid_argument("strong excitation: N0 must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("strong excitation: p must be in [0,1]");
  ExcitationModel m;
  m.regime = Regime::strong;
  m.atoms_total = atoms_total;
  m.p = p;
  m.nbar = p * static_cast<double>(atoms_total);
  return m;
}

double log_binomial_coefficient(long n, long k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double poisson_pmf(double mean, long k) {
  if (k < 0) return 0.0;
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(k) * std::log(mean) - mean -
                  std::lgamma(static_cast<double>(k) + 1.0));
}

double binomial_pmf(long n, double p, long k) {
  if (k < 0 || k > n) return 0.0;
  if (p == 0.0) return k == 0 ? 1.0 : 0.0;
  if (p == 1.0) return k == n ? 1.0 : 0.0;
  return std::exp(log_binomial_coefficient(n, k) + static_cast<double>(k) * std::log(p) +
                  static_cast<double>(n - k) * std::log1p(-p));
}

long poisson_truncation_bound(double mean, double tail) {
  if (mean <= 0.0) return 0;
  double pmf = std::exp(-mean);
  double cdf = pmf;
  long k = 0;
  while (1.0 - cdf >= tail) {
    ++k;
    pmf *= mean / static_cast<double>(k);
    cdf += pmf;
    if (k > 100000) break;  // unreachable for sane means
  }
  return k;
}

double excitation_pmf(const ExcitationModel& model, long n) {
  if (n < 0) throw std::invalid_argument("excitation_pmf: N must be >= 0");
  if (model.regime == Regime::weak) return poisson_pmf(model.nbar, n);
  if (n > model.atoms_total) throw std::invalid_argument("excitation_pmf: N exceeds N0");
  return binomial_pmf(model.atoms_total, model.p, n);
}

double detected_pmf(const ExcitationModel& model, const DetectionModel& det, long n) {
  if (n < 0) throw std::invalid_argument("detected_pmf: N must be >= 0");
  if (model.regime == Regime::weak) return poisson_pmf(model.nbar * det.efficiency, n);
  if (n > model.atoms_total) throw std::invalid_argument("detected_pmf: N exceeds N0");
  return binomial_pmf(model.atoms_total, model.p * det.efficiency, n);
}

long sample_excited_count(const ExcitationModel& model, RandomStream& rng) {
  if (model.regime == Regime::weak) return rng.poisson(model.nbar);
  return rng.binomial(model.atoms_total, model.p);
}

long thin_count(long excited, double efficiency, RandomStream& rng) {
  if (!(efficiency >= 0.0 && efficiency <= 1.0))
    throw std::invalid_argument("thin_count: efficiency must be in [0,1]");
  return rng.binomial(excited, efficiency);
}

}  // namespace rydsim
