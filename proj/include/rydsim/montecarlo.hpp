#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "rydsim/config.hpp"
#include "rydsim/estimator.hpp"
#include "rydsim/signal_model.hpp"

namespace rydsim {

// One laser shot.  Geometry detail is only filled on request (raw shot
// logging); the per-shot statistics are always present.
struct ShotRecord {
  std::uint64_t index = 0;
  long excited = 0;
  long detected = 0;
  long detected_transferred = 0;  // 37P among detected
  long detected_remaining = 0;    // 37S + 36P among detected
  int assigned = 0;               // post pulse-height; 0 = none/unassigned
  double transfer_probability = 0.0;  // per-atom rho_i at this shot
  long clamped_pairs = 0;             // pairs with |a|^2 clamped to 1

  std::vector<std::array<double, 3>> positions;   // m (detail only)
  std::vector<std::array<double, 3>> velocities;  // m/s (beam detail only)
  std::vector<double> pair_probabilities;         // |a_nm|^2 (detail only)
};

// Integer running sums for one (grid point, assigned N) bin; merging is an
// associative commutative addition, so shard order cannot change results.
struct BinAccumulator {
  long shots = 0;
  long long detected_sum = 0;
  long long transferred_sum = 0;
  long long transferred_sq_sum = 0;

  void add(const ShotRecord& shot);
  void merge(const BinAccumulator& other);
};

struct PostSelectedAccumulator {
  int max_channels = 8;
  std::vector<BinAccumulator> bins;  // one per assigned N = 1..max_channels
  std::vector<long> detected_histogram;  // marginal of the detected count
  long long clamped_pairs = 0;

  explicit PostSelectedAccumulator(int channels = 8);
  void add(const ShotRecord& shot);
  void merge(const PostSelectedAccumulator& other);

  // S_N with its standard error; nullopt for an empty bin.
  std::optional<ValueWithError> signal(int n) const;
};

ShotRecord run_shot(const ExperimentConfig& cfg, double detuning, std::uint64_t shot_index,
                    bool record_detail = false);

struct SweepResult {
  SpectrumGrid spectrum;
  std::vector<long> detected_histogram;  // aggregated over all grid points
  long long clamped_pairs = 0;
};

// Full grid sweep; shots are independent work units keyed by a global shot
// index, so the result is identical for any thread count.
SweepResult sweep(const ExperimentConfig& cfg, int threads = 1, int max_channels = 6);

}  // namespace rydsim
