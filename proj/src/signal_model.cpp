#include "rydsim/signal_model.hpp"

#include <cmath>

namespace rydsim {

namespace {

constexpr double kKernelTail = 1e-15;

// Visit the kernel weights K_j (j = i - N) of the post-selected sums.  The weak
// kernel is Poisson(nbar(1-T)); the strong kernel is Binomial(N0 - N, q) with
// q = nbar(1-T)/(N0 - nbar T).  Returns the largest j visited.
template <typename Fn>
long for_each_kernel_weight(const SignalInputs& in, int n, Fn&& fn) {
  const double t = in.detection.efficiency;
  if (in.excitation.regime == Regime::weak) {
    const double lambda = in.excitation.nbar * (1.0 - t);
    const long jmax = poisson_truncation_bound(lambda, kKernelTail);
    double w = std::exp(-lambda);
    for (long j = 0;; ++j) {
      fn(j, w);
      if (j >= jmax) return jmax;
      w *= lambda / static_cast<double>(j + 1);
    }
  }
  const long n0 = in.excitation.atoms_total;
  if (n > n0) throw std::invalid_argument("s_n: N exceeds N0");
  const double nbar = in.excitation.nbar;
  if (!(nbar * t < static_cast<double>(n0)))
    throw std::domain_error("s_n strong: requires nbar*T < N0");
  const double q = nbar * (1.0 - t) / (static_cast<double>(n0) - nbar * t);
  const long m = n0 - n;
  double cum = 0.0;
  long last = 0;
  for (long j = 0; j <= m; ++j) {
    const double w = binomial_pmf(m, q, j);
    fn(j, w);
    cum += w;
    last = j;
    if (1.0 - cum < kKernelTail && j > static_cast<long>(m * q)) break;
  }
  return last;
}

}  // namespace

double SignalInputs::rho_res_at(long i) const {
  if (i < 1) throw std::invalid_argument("rho_res_at: i must be >= 1");
  if (i == 1) return 0.0;
  if (!rho_res.empty()) {
    if (i <= static_cast<long>(rho_res.size())) return rho_res[i - 1];
    if (extrapolate_linear) {
      // Linear rule anchored on the two-atom entry.
      const double rho2 = rho_res.size() >= 2 ? rho_res[1] : rho2res.value_or(0.0);
      return static_cast<double>(i - 1) * rho2;
    }
    throw TruncationError("rho list shorter than the required truncation (i = " +
                          std::to_string(i) + ")");
  }
  if (rho2res) return static_cast<double>(i - 1) * *rho2res;
  return 0.0;
}

double s_n_full(const SignalInputs& inputs, int n) {
  if (n < 1) throw std::invalid_argument("s_n_full: N must be >= 1");
  double s = 0.0;
  for_each_kernel_weight(inputs, n, [&](long j, double w) { s += w * inputs.rho_at(n + j); });
  return s;
}

double s_n_reduced(const SignalInputs& inputs, int n) {
  if (n < 1) throw std::invalid_argument("s_n_reduced: N must be >= 1");
  double s = 0.0;
  for_each_kernel_weight(inputs, n, [&](long j, double w) { s += w * inputs.rho_res_at(n + j); });
  return inputs.background + s;
}

double s_n_closed(const SignalInputs& inputs, int n) {
  if (n < 1) throw std::invalid_argument("s_n_closed: N must be >= 1");
  if (!inputs.rho2res) throw std::invalid_argument("s_n_closed: scaling rule rho2res required");
  const double rho2 = *inputs.rho2res;
  const double t = inputs.detection.efficiency;
  const double nbar = inputs.excitation.nbar;
  if (inputs.excitation.regime == Regime::weak)
    return inputs.background + rho2 * (static_cast<double>(n - 1) + nbar * (1.0 - t));
  const double n0 = static_cast<double>(inputs.excitation.atoms_total);
  if (!(nbar * t < n0)) throw std::domain_error("s_n_closed strong: requires nbar*T < N0");
  const double mean_extra = (n0 - static_cast<double>(n)) * nbar * (1.0 - t) / (n0 - nbar * t);
  return inputs.background + rho2 * (static_cast<double>(n - 1) + mean_extra);
}

StateCounts expected_counts(const SignalInputs& inputs, int n) {
  if (n < 1) throw std::invalid_argument("expected_counts: N must be >= 1");
  if (inputs.pulses < 1) throw std::invalid_argument("expected_counts: Z must be >= 1");
  const double t = inputs.detection.efficiency;
  const double z = static_cast<double>(inputs.pulses);
  const double log_t = std::log(t);
  const double log_q = t < 1.0 ? std::log1p(-t) : 0.0;

  // Direct evaluation of the accumulated-count sums: terms
  //   P_i * C(i,N) T^N (1-T)^(i-N), i = N .. (truncation).
  double transferred = 0.0;
  double remaining = 0.0;
  long imax;
  if (inputs.excitation.regime == Regime::weak)
    imax = n + poisson_truncation_bound(inputs.excitation.nbar, kKernelTail) +
           poisson_truncation_bound(inputs.excitation.nbar * (1.0 - t), kKernelTail);
  else
    imax = inputs.excitation.atoms_total;
  for (long i = n; i <= imax; ++i) {
    const double pi = excitation_pmf(inputs.excitation, i);
    if (pi == 0.0) continue;
    double detect;
    if (t < 1.0)
      detect = std::exp(log_binomial_coefficient(i, n) + n * log_t + (i - n) * log_q);
    else
      detect = (i == n) ? 1.0 : 0.0;
    const double w = z * static_cast<double>(n) * pi * detect;
    const double rho = inputs.rho_at(i);
    transferred += w * rho;
    remaining += w * (1.0 - rho);
  }
  return {transferred, remaining};
}

}  // namespace rydsim
