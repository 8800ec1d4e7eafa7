#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "rydsim/statistics.hpp"

namespace rydsim {

// Raised when an explicit rho list is too short for the required sum
// truncation and extrapolation is disabled.
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything needed to evaluate the post-selected analytic signals at one
// grid point.  The resonant part is given either as an explicit list
// rho_res[i-1] = rho_i^res (with rho_1^res = 0) or through the linear
// scaling rule rho_i^res = (i-1) * rho2res.
struct SignalInputs {
  ExcitationModel excitation;
  DetectionModel detection{1.0};
  double background = 0.0;  // rho_1
  std::vector<double> rho_res;        // explicit list, indexed by i-1; may be empty
  std::optional<double> rho2res;      // scaling rule
  bool extrapolate_linear = false;    // extend a short explicit list linearly
  long pulses = 1;                    // Z

  // rho_i^res for i >= 1.  Throws TruncationError when the explicit list is
  // exhausted and no fallback applies.
  double rho_res_at(long i) const;
  double rho_at(long i) const { return background + rho_res_at(i); }
};

// Post-selected N-atom signal: full weighted sum over the actually excited
// atom number i >= N (Poisson kernel for weak excitation, binomial for
// strong).
double s_n_full(const SignalInputs& inputs, int n);

// Background-separated form: rho_1 plus the same kernel applied to the
// resonant parts only.
double s_n_reduced(const SignalInputs& inputs, int n);

// Closed form under the linear scaling rule.
//   weak:   rho_1 + rho2res * [N - 1 + nbar (1 - T)]
//   strong: rho_1 + rho2res * [N - 1 + (N0 - N) nbar (1-T) / (N0 - nbar T)]
// (the strong factor is the exact kernel mean; it tends to nbar(1-T) for
// N0 >> max(1, nbar T)).
double s_n_closed(const SignalInputs& inputs, int n);

// Expected accumulated per-state counts over Z pulses for post-selected N.
struct StateCounts {
  double transferred;  // n_N(37P)
  double remaining;    // n_N(37S) + n_N(36P)
};
StateCounts expected_counts(const SignalInputs& inputs, int n);

// Detuning/field spectrum container shared between the analytic model, the
// Monte Carlo engine and the serializers.
struct SpectrumGrid {
  std::vector<double> detuning;              // rad/s, strictly increasing
  std::vector<double> field;                 // V/cm, optional (empty if unused)
  int channels = 0;                          // number of N channels
  std::vector<std::vector<double>> values;   // [n-1][grid]
  std::vector<std::vector<double>> errors;   // statistical; empty rows for analytic output
  std::vector<std::vector<char>> present;    // 0 = missing bin
};

}  // namespace rydsim
