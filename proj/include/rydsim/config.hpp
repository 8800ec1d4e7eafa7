#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rydsim/dd_interaction.hpp"
#include "rydsim/detector_model.hpp"
#include "rydsim/statistics.hpp"

namespace rydsim {

// Parse/validation failure with the offending config line.
struct ConfigError : std::runtime_error {
  int line = 0;
  ConfigError(int line_no, const std::string& what)
      : std::runtime_error("config line " + std::to_string(line_no) + ": " + what), line(line_no) {}
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class CouplingMode {
  averaged,  // every pair carries the ensemble mean-square coupling
  pairwise   // couplings from the sampled atom positions (and velocities)
};

struct GridConfig {
  int points = 21;
  double detuning_min = -6e6 * 2.0 * 3.14159265358979323846;  // rad/s
  double detuning_max = 6e6 * 2.0 * 3.14159265358979323846;
  double field_center = 6.37;           // V/cm (axis annotation only)
  double field_to_detuning = 9.5154e9;  // rad/s per V/cm (35 mV/cm <-> 53 MHz)
};

struct DetectorConfig {
  bool enabled = false;
  int peaks = 5;
  double spacing = 0.4;  // V
  double width1 = 0.1;   // V, sigma of the single-electron peak

  HistogramModel model() const { return HistogramModel::equidistant(peaks, spacing, width1); }
};

// Full parameter set of a run; everything downstream reads from here.
struct ExperimentConfig {
  MotionRegime motion = MotionRegime::frozen;
  ExcitationModel excitation = ExcitationModel::weak(2.0);
  double efficiency = 1.0;        // T
  double background = 0.0;        // rho_1
  double interaction_time = 3e-6; // t0, s
  EnsembleGeometry geometry;
  DipoleConstants dipoles;
  BeamParameters beam;
  CouplingMode coupling = CouplingMode::averaged;
  // When set, fixes the averaged-coupling two-atom peak directly instead of
  // deriving it from the dipole constants.
  std::optional<double> rho2res_peak;
  GridConfig grid;
  long shots = 100000;
  long pulses = 1;
  std::uint64_t seed = 1;
  DetectorConfig detector;

  // Two-atom peak amplitude implied by the configuration (frozen:
  // msq * t0^2; beam: msq_beam * tau^2), honoring rho2res_peak.
  double two_atom_peak() const;
  // Mean-square pair coupling consistent with two_atom_peak().
  double effective_mean_square() const;

  std::vector<double> detuning_grid() const;
  std::vector<double> field_grid() const;

  void validate() const;  // throws ConfigError
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical serialization: fixed key order, 17 significant digits.
// load(emit(cfg)) == cfg bit-exactly.
std::string emit_config(const ExperimentConfig& cfg);

// FNV-1a hash of the canonical serialization, hex-encoded.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace rydsim
