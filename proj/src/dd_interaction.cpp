#include "rydsim/dd_interaction.hpp"

#include <algorithm>
#include <cmath>

#include "rydsim/constants.hpp"

namespace rydsim {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

using cplx = std::complex<double>;

// Adaptive Simpson on a complex-valued integrand.
cplx simpson(const std::function<cplx(double)>& f, double a, double b, cplx fa, cplx fm, cplx fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

cplx adaptive(const std::function<cplx(double)>& f, double a, double b, cplx fa, cplx fm, cplx fb,
              cplx whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const cplx fl = f(0.5 * (a + m));
  const cplx fr = f(0.5 * (m + b));
  const cplx left = simpson(f, a, m, fa, fl, fm);
  const cplx right = simpson(f, m, b, fm, fr, fb);
  const cplx delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive(f, a, m, fa, fl, fm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, b, fm, fr, fb, right, 0.5 * tol, depth - 1);
}

cplx integrate(const std::function<cplx(double)>& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  const cplx fa = f(a);
  const cplx fm = f(m);
  const cplx fb = f(b);
  const cplx whole = simpson(f, a, b, fa, fm, fb);
  return adaptive(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

double EnsembleGeometry::volume() const {
  if (shape == VolumeShape::box) return extent * extent * extent;
  const double r = 0.5 * extent;
  return 4.0 / 3.0 * constants::pi * r * r * r;
}

double EnsembleGeometry::atom_count() const { return density * volume(); }

double EnsembleGeometry::mean_spacing() const {
  return std::pow(4.0 * constants::pi * density / 3.0, -1.0 / 3.0);
}

void EnsembleGeometry::validate() const {
  if (!(density > 0.0)) throw std::invalid_argument("density must be > 0");
  if (!(extent > 0.0)) throw std::invalid_argument("extent must be > 0");
  if (!(mean_spacing() < extent))
    throw std::invalid_argument("mean spacing R0 must be smaller than the volume extent");
  if (atom_count() < 2.0) throw std::invalid_argument("excitation volume must hold at least 2 atoms");
}

BeamParameters::BeamParameters() : atom_mass(constants::sodium_mass) {}

double BeamParameters::most_probable_speed() const {
  return std::sqrt(2.0 * constants::k_boltzmann * temperature / atom_mass);
}

double BeamParameters::collision_time(double mean_spacing) const {
  return 2.0 * mean_spacing / most_probable_speed();
}

void BeamParameters::validate() const {
  if (!(temperature > 0.0)) throw std::invalid_argument("beam temperature must be > 0");
  if (!(atom_mass > 0.0)) throw std::invalid_argument("atom mass must be > 0");
}

double omega0(const DipoleConstants& dip, const EnsembleGeometry& geom) {
  dip.validate();
  const double d1 = dip.radial1_au * dip.angular_factor * constants::atomic_dipole;
  const double d2 = dip.radial2_au * dip.angular_factor * constants::atomic_dipole;
  const double r0 = geom.mean_spacing();
  return d1 * d2 / (4.0 * constants::pi * constants::epsilon0 * r0 * r0 * r0 * constants::hbar);
}

double mean_square_coupling(double omega0_value, double atoms_total, MotionRegime regime) {
  if (!(atoms_total >= 1.0)) throw std::invalid_argument("mean_square_coupling: N0 must be >= 1");
  const double w2 = omega0_value * omega0_value;
  if (regime == MotionRegime::frozen) return w2 / atoms_total;
  return w2 / std::pow(atoms_total, 2.0 / 3.0);
}

std::complex<double> pair_amplitude(const std::function<double(double)>& coupling,
                                    double detuning, double t0,
                                    std::span<const double> knots, double rel_tol) {
  if (!(t0 > 0.0)) throw std::invalid_argument("pair_amplitude: t0 must be > 0");
  const auto integrand = [&](double t) -> cplx {
    const double w = coupling(t);
    return cplx(w * std::cos(detuning * t), -w * std::sin(detuning * t));
  };

  std::vector<double> pts{0.0, t0};
  for (double k : knots)
    if (k > 0.0 && k < t0) pts.push_back(k);
  // Seed enough panels to resolve the e^{-i Delta t} oscillation; without
  // this the first Simpson estimates can alias when Delta*t0 is a multiple
  // of the dyadic subdivision phases.
  const double phase = std::abs(detuning) * t0;
  const long oscillation_panels = std::min<long>(4096, static_cast<long>(phase / 1.5) + 1);
  for (long i = 1; i < oscillation_panels; ++i)
    pts.push_back(t0 * static_cast<double>(i) / static_cast<double>(oscillation_panels));
  std::sort(pts.begin(), pts.end());

  // Scale-setting pass for the absolute tolerance of each panel.
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double m = 0.5 * (pts[i] + pts[i + 1]);
    scale += std::abs(coupling(m)) * (pts[i + 1] - pts[i]);
  }
  const double tol = std::max(scale * rel_tol, 1e-300);

  cplx sum{0.0, 0.0};
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    sum += integrate(integrand, pts[i], pts[i + 1], tol / static_cast<double>(pts.size()));
  return cplx(0.0, -1.0) * sum;
}

double frozen_pair_probability(double mean_square, double t0, double detuning) {
  const double s = sinc(0.5 * t0 * detuning);
  return mean_square * t0 * t0 * s * s;
}

ResonanceProfile frozen_profile(double mean_square, int atoms, double t0,
                                std::span<const double> detuning_grid) {
  if (atoms < 1) throw std::invalid_argument("frozen_profile: N must be >= 1");
  ResonanceProfile p;
  p.atoms = atoms;
  p.regime = MotionRegime::frozen;
  p.detuning.assign(detuning_grid.begin(), detuning_grid.end());
  p.value.resize(p.detuning.size());
  for (std::size_t i = 0; i < p.detuning.size(); ++i)
    p.value[i] = static_cast<double>(atoms - 1) * frozen_pair_probability(mean_square, t0, p.detuning[i]);
  return p;
}

double beam_profile_peak(double mean_square_beam, double tau, int atoms) {
  if (atoms < 1) throw std::invalid_argument("beam_profile_peak: N must be >= 1");
  return static_cast<double>(atoms - 1) * mean_square_beam * tau * tau;
}

std::function<double(double)> beam_coupling_history(double rel_speed, double impact_parameter,
                                                    double t_peak, double omega0_value,
                                                    double mean_spacing) {
  if (!(impact_parameter > 0.0))
    throw std::invalid_argument("beam_coupling_history: impact parameter must be > 0");
  const double r0_cubed = mean_spacing * mean_spacing * mean_spacing;
  return [=](double t) {
    const double x = rel_speed * (t - t_peak);
    const double d2 = x * x + impact_parameter * impact_parameter;
    return omega0_value * r0_cubed / (d2 * std::sqrt(d2));
  };
}

ResonanceProfile profile_scaling(const ResonanceProfile& two_atom, int atoms) {
  if (atoms < 1) throw std::invalid_argument("profile_scaling: N must be >= 1");
  ResonanceProfile p = two_atom;
  p.atoms = atoms;
  for (double& v : p.value) v *= static_cast<double>(atoms - 1);
  return p;
}

}  // namespace rydsim
