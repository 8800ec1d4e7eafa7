#pragma once

#include <stdexcept>

#include "rydsim/rng.hpp"

namespace rydsim {

enum class Regime { weak, strong };

// Number statistics of the laser-excited Rydberg atoms.  Weak excitation is
// Poissonian with mean `nbar`; strong excitation is binomial over the
// `atoms_total` ground-state atoms with per-atom probability `p`.
struct ExcitationModel {
  Regime regime = Regime::weak;
  long atoms_total = 0;  // N0 (strong regime)
  double p = 0.0;        // per-atom excitation probability (strong regime)
  double nbar = 0.0;     // mean excited atoms per pulse

  static ExcitationModel weak(double nbar);
  static ExcitationModel strong(long atoms_total, double p);
};

// Detector acting as an independent per-atom thinning with efficiency T.
struct DetectionModel {
  double efficiency = 1.0;  // T in (0, 1]

  explicit DetectionModel(double t) : efficiency(t) {
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("detection efficiency must be in (0,1]");
  }
};

// --- small numeric helpers shared across modules ---

double log_binomial_coefficient(long n, long k);
double poisson_pmf(double mean, long k);
double binomial_pmf(long n, double p, long k);

// Smallest nmax such that the Poisson upper tail beyond nmax is < tail.
long poisson_truncation_bound(double mean, double tail = 1e-12);

// --- probability distributions of the excited / detected atom number ---

double excitation_pmf(const ExcitationModel& model, long n);
double detected_pmf(const ExcitationModel& model, const DetectionModel& det, long n);

long sample_excited_count(const ExcitationModel& model, RandomStream& rng);

// Binomial thinning of an excited count by detection efficiency.
long thin_count(long excited, double efficiency, RandomStream& rng);

}  // namespace rydsim
