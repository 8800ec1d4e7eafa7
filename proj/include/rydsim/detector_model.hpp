#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rydsim/rng.hpp"

namespace rydsim {

// Channeltron pulse-height response: Gaussian peaks at (near-)equidistant
// centers, one per detected-atom number, plus amplitude windows used to
// assign N from a measured pulse.
struct HistogramModel {
  std::vector<double> centers;  // volts, index k-1 for k atoms
  std::vector<double> widths;   // volts (1 sigma)
  std::vector<std::pair<double, double>> windows;  // [lo, hi) per assigned N

  int max_atoms() const { return static_cast<int>(centers.size()); }

  // Equidistant centers spacing*k with widths width1*sqrt(k) and
  // midpoint windows.
  static HistogramModel equidistant(int peaks, double spacing, double width1);
  // Centers at 0.4 V spacing with the 0.2-0.6 V / 0.6-1.0 V window preset.
  static HistogramModel reference_preset(int peaks = 5);

  void validate() const;
};

struct BinnedHistogram {
  double lo = 0.0;
  double bin_width = 0.02;  // volts
  std::vector<long> counts;

  long total() const;
};

// Draw one pulse amplitude for a detected count (count must be in
// [1, max_atoms]).
double sample_amplitude(long detected, const HistogramModel& model, RandomStream& rng);

// Amplitude histogram for a stream of detected counts; counts of zero or
// beyond the modeled peaks produce no pulse in the modeled range.
BinnedHistogram synthesize_histogram(std::span<const long> detected_counts,
                                     const HistogramModel& model, RandomStream& rng,
                                     double bin_width = 0.02);

// Window lookup; 0 means unassigned.
int assign_atom_number(double amplitude, const HistogramModel& model);

// M[k-1][N]: probability that a true k-atom pulse is assigned N
// (column 0 = unassigned).  Rows sum to 1.
std::vector<std::vector<double>> misassignment_matrix(const HistogramModel& model);

}  // namespace rydsim
