#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace rydsim {

// Counter-seeded random stream.  Each (seed, stream) pair yields an
// independent, reproducible sequence regardless of how many other streams
// exist or in what order they are consumed, so Monte Carlo shots can be
// dispatched to threads arbitrarily.  The core generator is splitmix64.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) {
    // Two finalization rounds decorrelate (seed, stream) pairs.
    state_ = mix(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
    state_ = mix(state_ ^ (stream * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (pairs cached).
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  // Exact Poisson sample by CDF inversion; large means are split into
  // chunks using additivity so the recurrence stays well conditioned.
  long poisson(double mean) {
    if (mean < 0.0) throw std::invalid_argument("poisson: negative mean");
    long total = 0;
    while (mean > 32.0) {
      total += poisson_inversion(32.0);
      mean -= 32.0;
    }
    return total + poisson_inversion(mean);
  }

  // Exact binomial sample.  Inversion for moderate means, Bernoulli loop
  // otherwise.
  long binomial(long n, double p) {
    if (n < 0 || p < 0.0 || p > 1.0) throw std::invalid_argument("binomial: bad parameters");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    if (p > 0.5) return n - binomial(n, 1.0 - p);
    if (n * p <= 30.0) return binomial_inversion(n, p);
    long k = 0;
    for (long i = 0; i < n; ++i) k += (uniform() < p) ? 1 : 0;
    return k;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  long poisson_inversion(double mean) {
    if (mean <= 0.0) return 0;
    const double u = uniform();
    double pmf = std::exp(-mean);
    double cdf = pmf;
    long k = 0;
    while (u > cdf && k < 2000) {
      ++k;
      pmf *= mean / static_cast<double>(k);
      cdf += pmf;
    }
    return k;
  }

  long binomial_inversion(long n, double p) {
    const double u = uniform();
    const double q = 1.0 - p;
    double pmf = std::exp(static_cast<double>(n) * std::log1p(-p));
    double cdf = pmf;
    long k = 0;
    while (u > cdf && k < n) {
      ++k;
      pmf *= p * static_cast<double>(n - k + 1) / (q * static_cast<double>(k));
      cdf += pmf;
    }
    return k;
  }

  std::uint64_t state_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace rydsim
