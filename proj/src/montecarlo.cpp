#include "rydsim/montecarlo.hpp"

#include <cmath>
#include <thread>

#include "rydsim/constants.hpp"
#include "rydsim/rng.hpp"

namespace rydsim {

namespace {

constexpr int kHistogramSlots = 32;

std::array<double, 3> sample_position(const EnsembleGeometry& geom, RandomStream& rng) {
  const double l = geom.extent;
  if (geom.shape == VolumeShape::box)
    return {rng.uniform() * l, rng.uniform() * l, rng.uniform() * l};
  // Rejection sampling inside the sphere of diameter l.
  const double r = 0.5 * l;
  for (;;) {
    const double x = rng.uniform(-r, r);
    const double y = rng.uniform(-r, r);
    const double z = rng.uniform(-r, r);
    if (x * x + y * y + z * z <= r * r) return {x, y, z};
  }
}

double distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// |a_nm|^2 for one pair, clamped to 1.
double pair_probability_frozen(double omega_nm, double t0, double detuning, long& clamped) {
  double p = frozen_pair_probability(omega_nm * omega_nm, t0, detuning);
  if (p > 1.0) {
    p = 1.0;
    ++clamped;
  }
  return p;
}

double pair_probability_beam(const ExperimentConfig& cfg, double omega0_value, double r0,
                             const std::array<double, 3>& r_rel,
                             const std::array<double, 3>& v_rel, double t_peak, double detuning,
                             long& clamped) {
  const double v = std::sqrt(v_rel[0] * v_rel[0] + v_rel[1] * v_rel[1] + v_rel[2] * v_rel[2]);
  // Impact parameter: component of the separation perpendicular to the
  // relative velocity.
  double b;
  if (v > 0.0) {
    const double along = (r_rel[0] * v_rel[0] + r_rel[1] * v_rel[1] + r_rel[2] * v_rel[2]) / v;
    const double r2 = r_rel[0] * r_rel[0] + r_rel[1] * r_rel[1] + r_rel[2] * r_rel[2];
    b = std::sqrt(std::max(r2 - along * along, 0.0));
  } else {
    b = distance({0.0, 0.0, 0.0}, r_rel);
  }
  b = std::max(b, 1e-3 * r0);  // head-on guard; such pairs clamp anyway
  const auto history = beam_coupling_history(v, b, t_peak, omega0_value, r0);
  const double width = v > 0.0 ? b / v : cfg.interaction_time;
  const std::array<double, 6> knots{t_peak - 10.0 * width, t_peak - width, t_peak,
                                    t_peak + width, t_peak + 10.0 * width, 0.0};
  const auto a = pair_amplitude(history, detuning, cfg.interaction_time,
                                std::span<const double>(knots.data(), 5), 1e-6);
  double p = std::norm(a);
  if (p > 1.0) {
    p = 1.0;
    ++clamped;
  }
  return p;
}

}  // namespace

void BinAccumulator::add(const ShotRecord& shot) {
  ++shots;
  detected_sum += shot.detected;
  transferred_sum += shot.detected_transferred;
  transferred_sq_sum += shot.detected_transferred * shot.detected_transferred;
}

void BinAccumulator::merge(const BinAccumulator& other) {
  shots += other.shots;
  detected_sum += other.detected_sum;
  transferred_sum += other.transferred_sum;
  transferred_sq_sum += other.transferred_sq_sum;
}

PostSelectedAccumulator::PostSelectedAccumulator(int channels)
    : max_channels(channels), bins(channels), detected_histogram(kHistogramSlots, 0) {}

void PostSelectedAccumulator::add(const ShotRecord& shot) {
  const long slot = std::min<long>(shot.detected, kHistogramSlots - 1);
  ++detected_histogram[slot];
  clamped_pairs += shot.clamped_pairs;
  if (shot.assigned >= 1 && shot.assigned <= max_channels) bins[shot.assigned - 1].add(shot);
}

void PostSelectedAccumulator::merge(const PostSelectedAccumulator& other) {
  for (int i = 0; i < max_channels; ++i) bins[i].merge(other.bins[i]);
  for (int i = 0; i < kHistogramSlots; ++i) detected_histogram[i] += other.detected_histogram[i];
  clamped_pairs += other.clamped_pairs;
}

std::optional<ValueWithError> PostSelectedAccumulator::signal(int n) const {
  if (n < 1 || n > max_channels) return std::nullopt;
  const auto& b = bins[n - 1];
  if (b.shots == 0 || b.detected_sum == 0) return std::nullopt;
  const double k = static_cast<double>(b.shots);
  const double mean_x = static_cast<double>(b.transferred_sum) / k;
  const double mean_m = static_cast<double>(b.detected_sum) / k;
  const double s = mean_x / mean_m;
  // Shot-level variance of the transferred count.
  const double var_x =
      std::max(static_cast<double>(b.transferred_sq_sum) / k - mean_x * mean_x, 0.0);
  const double err = std::sqrt(var_x / k) / mean_m;
  return ValueWithError{s, err};
}

ShotRecord run_shot(const ExperimentConfig& cfg, double detuning, std::uint64_t shot_index,
                    bool record_detail) {
  RandomStream rng(cfg.seed, shot_index);
  ShotRecord shot;
  shot.index = shot_index;
  shot.excited = sample_excited_count(cfg.excitation, rng);
  const long i = shot.excited;

  // Per-atom resonant transfer probability rho_i^res = (1/i) sum_{n != m} |a_nm|^2.
  double rho_res = 0.0;
  const bool needs_geometry =
      cfg.coupling == CouplingMode::pairwise || cfg.motion == MotionRegime::beam || record_detail;
  std::vector<std::array<double, 3>> pos;
  std::vector<std::array<double, 3>> vel;
  if (needs_geometry && i > 0) {
    pos.reserve(i);
    for (long k = 0; k < i; ++k) pos.push_back(sample_position(cfg.geometry, rng));
    if (cfg.motion == MotionRegime::beam) {
      const double sigma_v =
          std::sqrt(constants::k_boltzmann * cfg.beam.temperature / cfg.beam.atom_mass);
      vel.reserve(i);
      for (long k = 0; k < i; ++k)
        vel.push_back({rng.normal(0.0, sigma_v), rng.normal(0.0, sigma_v), rng.normal(0.0, sigma_v)});
    }
  }

  if (i >= 2) {
    if (cfg.coupling == CouplingMode::averaged) {
      double p = frozen_pair_probability(cfg.effective_mean_square(), cfg.interaction_time, detuning);
      if (p > 1.0) {
        p = 1.0;
        ++shot.clamped_pairs;
      }
      rho_res = static_cast<double>(i - 1) * p;
      if (record_detail) shot.pair_probabilities.assign(i * (i - 1) / 2, p);
    } else {
      const double w0 = omega0(cfg.dipoles, cfg.geometry);
      const double r0 = cfg.geometry.mean_spacing();
      double pair_sum = 0.0;  // over unordered pairs
      for (long n = 0; n < i; ++n) {
        for (long m = n + 1; m < i; ++m) {
          double p;
          if (cfg.motion == MotionRegime::frozen) {
            const double r = std::max(distance(pos[n], pos[m]), 1e-3 * r0);
            const double omega_nm = w0 * std::pow(r0 / r, 3.0);
            p = pair_probability_frozen(omega_nm, cfg.interaction_time, detuning,
                                        shot.clamped_pairs);
          } else {
            const std::array<double, 3> r_rel{pos[n][0] - pos[m][0], pos[n][1] - pos[m][1],
                                              pos[n][2] - pos[m][2]};
            const std::array<double, 3> v_rel{vel[n][0] - vel[m][0], vel[n][1] - vel[m][1],
                                              vel[n][2] - vel[m][2]};
            const double t_peak = rng.uniform() * cfg.interaction_time;
            p = pair_probability_beam(cfg, w0, r0, r_rel, v_rel, t_peak, detuning,
                                      shot.clamped_pairs);
          }
          pair_sum += p;
          if (record_detail) shot.pair_probabilities.push_back(p);
        }
      }
      rho_res = 2.0 * pair_sum / static_cast<double>(i);
    }
  }

  double transfer = cfg.background + rho_res;
  if (transfer > 1.0) {
    transfer = 1.0;
    ++shot.clamped_pairs;
  }
  shot.transfer_probability = transfer;

  for (long k = 0; k < i; ++k) {
    const bool transferred = rng.uniform() < transfer;
    const bool detected = rng.uniform() < cfg.efficiency;
    if (!detected) continue;
    ++shot.detected;
    if (transferred) ++shot.detected_transferred;
    else ++shot.detected_remaining;
  }

  if (shot.detected == 0) {
    shot.assigned = 0;
  } else if (!cfg.detector.enabled) {
    shot.assigned = static_cast<int>(shot.detected);
  } else if (shot.detected <= cfg.detector.peaks) {
    const auto model = cfg.detector.model();
    const double amplitude = sample_amplitude(shot.detected, model, rng);
    shot.assigned = assign_atom_number(amplitude, model);
  } else {
    shot.assigned = 0;  // saturated pulse outside the modeled peaks
  }

  if (record_detail) {
    shot.positions = std::move(pos);
    shot.velocities = std::move(vel);
  }
  return shot;
}

SweepResult sweep(const ExperimentConfig& cfg, int threads, int max_channels) {
  cfg.validate();
  threads = std::max(threads, 1);
  const auto grid = cfg.detuning_grid();
  const auto fields = cfg.field_grid();

  SweepResult result;
  result.spectrum.detuning = grid;
  result.spectrum.field = fields;
  result.spectrum.channels = max_channels;
  result.spectrum.values.assign(max_channels, std::vector<double>(grid.size(), 0.0));
  result.spectrum.errors.assign(max_channels, std::vector<double>(grid.size(), 0.0));
  result.spectrum.present.assign(max_channels, std::vector<char>(grid.size(), 0));
  result.detected_histogram.assign(kHistogramSlots, 0);

  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double detuning = grid[g];
    const std::uint64_t base = static_cast<std::uint64_t>(g) * static_cast<std::uint64_t>(cfg.shots);
    std::vector<PostSelectedAccumulator> partial(threads, PostSelectedAccumulator(max_channels));
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t]() {
        for (long s = t; s < cfg.shots; s += threads)
          partial[t].add(run_shot(cfg, detuning, base + static_cast<std::uint64_t>(s)));
      });
    }
    for (auto& th : pool) th.join();
    PostSelectedAccumulator acc(max_channels);
    for (const auto& p : partial) acc.merge(p);

    for (int n = 1; n <= max_channels; ++n) {
      if (const auto s = acc.signal(n)) {
        result.spectrum.values[n - 1][g] = s->value;
        result.spectrum.errors[n - 1][g] = s->error;
        result.spectrum.present[n - 1][g] = 1;
      }
    }
    for (int k = 0; k < kHistogramSlots; ++k)
      result.detected_histogram[k] += acc.detected_histogram[k];
    result.clamped_pairs += acc.clamped_pairs;
  }
  return result;
}

}  // namespace rydsim
