#pragma once

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rydsim {

// Radial dipole matrix elements of the two collision channels in atomic
// units, plus the common angular factor.  Converted to SI at use sites.
struct DipoleConstants {
  double radial1_au = 1372.0;  // 37S - 36P
  double radial2_au = 1439.0;  // 37S - 37P
  double angular_factor = 0.47140452079103173;  // sqrt(2)/3

  void validate() const {
    if (!(radial1_au > 0.0 && radial2_au > 0.0))
      throw std::invalid_argument("dipole moments must be > 0");
    if (!(angular_factor > 0.0 && angular_factor <= 1.0))
      throw std::invalid_argument("angular factor must be in (0,1]");
  }
};

enum class VolumeShape { box, sphere };

// Ground-state ensemble in the excitation volume.
struct EnsembleGeometry {
  double density = 8e16;        // n0, m^-3
  VolumeShape shape = VolumeShape::box;
  double extent = 50e-6;        // linear size L (box side or sphere diameter), m

  double volume() const;
  double atom_count() const;    // N0 = n0 * V
  // Average spacing between neighboring atoms, R0 = (4 pi n0 / 3)^(-1/3).
  double mean_spacing() const;

  void validate() const;
};

// Thermal beam kinematics.
struct BeamParameters {
  double temperature = 650.0;   // K
  double atom_mass;             // kg

  BeamParameters();

  double most_probable_speed() const;              // v0 = sqrt(2 kB T / M)
  double collision_time(double mean_spacing) const;  // tau = 2 R0 / v0

  void validate() const;
};

enum class MotionRegime { frozen, beam };

// Resonance spectrum for N atoms on a detuning grid.
struct ResonanceProfile {
  std::vector<double> detuning;  // rad/s
  std::vector<double> value;     // population fraction
  int atoms = 2;
  MotionRegime regime = MotionRegime::frozen;
};

// Pair coupling at the mean neighbor spacing: hbar*Omega0 = d1 d2 / (4 pi eps0 R0^3).
// Returns Omega0 in rad/s.
double omega0(const DipoleConstants& dip, const EnsembleGeometry& geom);

// Ensemble-averaged mean-square pair coupling, rad^2/s^2.
// frozen: Omega0^2 / N0;  beam: Omega0^2 / N0^(2/3).
double mean_square_coupling(double omega0_value, double atoms_total, MotionRegime regime);

// Perturbative two-atom transition amplitude
//   a(t0) = -i * int_0^t0 Omega(t) exp(-i Delta t) dt
// by adaptive quadrature.  `knots` forces subdivision points (useful for
// sharply peaked collision histories); may be empty.
std::complex<double> pair_amplitude(const std::function<double(double)>& coupling,
                                    double detuning, double t0,
                                    std::span<const double> knots = {},
                                    double rel_tol = 1e-6);

// Frozen-gas line shape: rho_N(Delta) = (N-1) * msq * t0^2 * sinc^2(t0 Delta / 2).
ResonanceProfile frozen_profile(double mean_square, int atoms, double t0,
                                std::span<const double> detuning_grid);
double frozen_pair_probability(double mean_square, double t0, double detuning);

// Peak amplitude of the beam resonance: (N-1) * msq_beam * tau^2.
double beam_profile_peak(double mean_square_beam, double tau, int atoms);

// Flyby coupling history Omega(t) = Omega0 R0^3 / [v^2 (t - t_peak)^2 + b^2]^(3/2).
std::function<double(double)> beam_coupling_history(double rel_speed, double impact_parameter,
                                                    double t_peak, double omega0_value,
                                                    double mean_spacing);

// rho_N = (N-1) * rho_2, pointwise.
ResonanceProfile profile_scaling(const ResonanceProfile& two_atom, int atoms);

// Half-max argument of sinc^2: sinc^2(u) = 1/2 at u = sinc2_half_max_u.
inline constexpr double sinc2_half_max_u = 1.39155737825151;

}  // namespace rydsim
