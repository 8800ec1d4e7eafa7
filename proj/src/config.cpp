#include "rydsim/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace rydsim {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct KeyValue {
  std::string value;
  int line;
};

struct Parsed {
  std::map<std::string, KeyValue> kv;

  bool has(const std::string& k) const { return kv.count(k) != 0; }

  std::string str(const std::string& k, const std::string& fallback) const {
    auto it = kv.find(k);
    return it == kv.end() ? fallback : it->second.value;
  }

  double num(const std::string& k, double fallback) const {
    auto it = kv.find(k);
    if (it == kv.end()) return fallback;
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second.value, &pos);
      if (pos != it->second.value.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(it->second.line, "invalid number for '" + k + "': " + it->second.value);
    }
  }

  long integer(const std::string& k, long fallback) const {
    auto it = kv.find(k);
    if (it == kv.end()) return fallback;
    try {
      return std::stol(it->second.value);
    } catch (const std::exception&) {
      throw ConfigError(it->second.line, "invalid integer for '" + k + "': " + it->second.value);
    }
  }

  int line_of(const std::string& k) const {
    auto it = kv.find(k);
    return it == kv.end() ? 0 : it->second.line;
  }
};

const std::vector<std::string> kKnownKeys = {
    "regime", "excitation", "nbar", "p", "atoms_total", "efficiency", "background",
    "interaction_time", "density", "shape", "extent", "dipole1", "dipole2", "angular_factor",
    "beam_temperature", "atom_mass", "coupling", "rho2res_peak", "grid_points", "detuning_min",
    "detuning_max", "field_center", "field_to_detuning", "shots", "pulses", "seed",
    "detector", "detector_peaks", "detector_spacing", "detector_width"};

}  // namespace

double ExperimentConfig::effective_mean_square() const {
  if (rho2res_peak) {
    if (motion == MotionRegime::frozen) return *rho2res_peak / (interaction_time * interaction_time);
    const double tau = beam.collision_time(geometry.mean_spacing());
    return *rho2res_peak / (tau * tau);
  }
  return mean_square_coupling(omega0(dipoles, geometry), geometry.atom_count(), motion);
}

double ExperimentConfig::two_atom_peak() const {
  if (rho2res_peak) return *rho2res_peak;
  const double msq = effective_mean_square();
  if (motion == MotionRegime::frozen) return msq * interaction_time * interaction_time;
  const double tau = beam.collision_time(geometry.mean_spacing());
  return msq * tau * tau;
}

std::vector<double> ExperimentConfig::detuning_grid() const {
  std::vector<double> g(grid.points);
  if (grid.points == 1) {
    g[0] = 0.5 * (grid.detuning_min + grid.detuning_max);
    return g;
  }
  const double step = (grid.detuning_max - grid.detuning_min) / (grid.points - 1);
  for (int i = 0; i < grid.points; ++i) g[i] = grid.detuning_min + step * i;
  return g;
}

std::vector<double> ExperimentConfig::field_grid() const {
  auto g = detuning_grid();
  for (double& v : g) v = grid.field_center + v / grid.field_to_detuning;
  return g;
}

void ExperimentConfig::validate() const {
  if (!(efficiency > 0.0 && efficiency <= 1.0))
    throw ConfigError("efficiency must be in (0,1]");
  if (!(background >= 0.0 && background <= 1.0))
    throw ConfigError("background must be in [0,1]");
  if (!(interaction_time > 0.0)) throw ConfigError("interaction_time must be > 0");
  if (excitation.regime == Regime::strong && excitation.nbar > excitation.atoms_total)
    throw ConfigError("strong excitation requires nbar <= N0");
  geometry.validate();
  dipoles.validate();
  if (motion == MotionRegime::beam) {
    beam.validate();
    if (coupling == CouplingMode::averaged)
      throw ConfigError("beam regime requires coupling = pairwise (no analytic beam line shape)");
  }
  if (rho2res_peak && !(*rho2res_peak >= 0.0)) throw ConfigError("rho2res_peak must be >= 0");
  if (background + two_atom_peak() > 1.0)
    throw ConfigError("background + two-atom peak exceeds 1 (population fraction)");
  if (grid.points < 1) throw ConfigError("grid_points must be >= 1");
  if (!(grid.detuning_min <= grid.detuning_max)) throw ConfigError("detuning_min > detuning_max");
  if (!(grid.field_to_detuning > 0.0)) throw ConfigError("field_to_detuning must be > 0");
  if (shots < 1) throw ConfigError("shots must be >= 1");
  if (pulses < 1) throw ConfigError("pulses must be >= 1");
  if (detector.enabled) detector.model().validate();
}

ExperimentConfig parse_config(const std::string& text) {
  Parsed p;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(line_no, "empty key or value");
    bool known = false;
    for (const auto& k : kKnownKeys) known = known || k == key;
    if (!known) throw ConfigError(line_no, "unknown key '" + key + "'");
    if (p.kv.count(key)) throw ConfigError(line_no, "duplicate key '" + key + "'");
    p.kv[key] = {value, line_no};
  }

  ExperimentConfig cfg;
  {
    const std::string r = p.str("regime", "frozen");
    if (r == "frozen") cfg.motion = MotionRegime::frozen;
    else if (r == "beam") cfg.motion = MotionRegime::beam;
    else throw ConfigError(p.line_of("regime"), "regime must be frozen or beam");
  }
  {
    const std::string e = p.str("excitation", "weak");
    if (e == "weak") {
      cfg.excitation = ExcitationModel::weak(p.num("nbar", 2.0));
    } else if (e == "strong") {
      if (!p.has("atoms_total"))
        throw ConfigError(p.line_of("excitation"), "strong excitation requires atoms_total");
      const long n0 = p.integer("atoms_total", 0);
      double prob;
      if (p.has("p")) prob = p.num("p", 0.0);
      else if (p.has("nbar")) prob = p.num("nbar", 0.0) / static_cast<double>(n0);
      else throw ConfigError(p.line_of("excitation"), "strong excitation requires p or nbar");
      try {
        cfg.excitation = ExcitationModel::strong(n0, prob);
      } catch (const std::exception& ex) {
        throw ConfigError(p.line_of("excitation"), ex.what());
      }
    } else {
      throw ConfigError(p.line_of("excitation"), "excitation must be weak or strong");
    }
  }
  cfg.efficiency = p.num("efficiency", 1.0);
  cfg.background = p.num("background", 0.0);
  cfg.interaction_time = p.num("interaction_time", 3e-6);
  cfg.geometry.density = p.num("density", 8e16);
  {
    const std::string s = p.str("shape", "box");
    if (s == "box") cfg.geometry.shape = VolumeShape::box;
    else if (s == "sphere") cfg.geometry.shape = VolumeShape::sphere;
    else throw ConfigError(p.line_of("shape"), "shape must be box or sphere");
  }
  cfg.geometry.extent = p.num("extent", 50e-6);
  cfg.dipoles.radial1_au = p.num("dipole1", cfg.dipoles.radial1_au);
  cfg.dipoles.radial2_au = p.num("dipole2", cfg.dipoles.radial2_au);
  cfg.dipoles.angular_factor = p.num("angular_factor", cfg.dipoles.angular_factor);
  cfg.beam.temperature = p.num("beam_temperature", cfg.beam.temperature);
  cfg.beam.atom_mass = p.num("atom_mass", cfg.beam.atom_mass);
  {
    const std::string c = p.str("coupling", "averaged");
    if (c == "averaged") cfg.coupling = CouplingMode::averaged;
    else if (c == "pairwise") cfg.coupling = CouplingMode::pairwise;
    else throw ConfigError(p.line_of("coupling"), "coupling must be averaged or pairwise");
  }
  if (p.has("rho2res_peak")) cfg.rho2res_peak = p.num("rho2res_peak", 0.0);
  cfg.grid.points = static_cast<int>(p.integer("grid_points", cfg.grid.points));
  cfg.grid.detuning_min = p.num("detuning_min", cfg.grid.detuning_min);
  cfg.grid.detuning_max = p.num("detuning_max", cfg.grid.detuning_max);
  cfg.grid.field_center = p.num("field_center", cfg.grid.field_center);
  cfg.grid.field_to_detuning = p.num("field_to_detuning", cfg.grid.field_to_detuning);
  cfg.shots = p.integer("shots", cfg.shots);
  cfg.pulses = p.integer("pulses", cfg.pulses);
  cfg.seed = static_cast<std::uint64_t>(p.integer("seed", 1));
  {
    const std::string d = p.str("detector", "off");
    if (d == "on") cfg.detector.enabled = true;
    else if (d == "off") cfg.detector.enabled = false;
    else throw ConfigError(p.line_of("detector"), "detector must be on or off");
  }
  cfg.detector.peaks = static_cast<int>(p.integer("detector_peaks", cfg.detector.peaks));
  cfg.detector.spacing = p.num("detector_spacing", cfg.detector.spacing);
  cfg.detector.width1 = p.num("detector_width", cfg.detector.width1);

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const ExperimentConfig& cfg) {
  std::ostringstream o;
  o << "regime = " << (cfg.motion == MotionRegime::frozen ? "frozen" : "beam") << "\n";
  if (cfg.excitation.regime == Regime::weak) {
    o << "excitation = weak\n";
    o << "nbar = " << format_double(cfg.excitation.nbar) << "\n";
  } else {
    o << "excitation = strong\n";
    o << "atoms_total = " << cfg.excitation.atoms_total << "\n";
    o << "p = " << format_double(cfg.excitation.p) << "\n";
  }
  o << "efficiency = " << format_double(cfg.efficiency) << "\n";
  o << "background = " << format_double(cfg.background) << "\n";
  o << "interaction_time = " << format_double(cfg.interaction_time) << "\n";
  o << "density = " << format_double(cfg.geometry.density) << "\n";
  o << "shape = " << (cfg.geometry.shape == VolumeShape::box ? "box" : "sphere") << "\n";
  o << "extent = " << format_double(cfg.geometry.extent) << "\n";
  o << "dipole1 = " << format_double(cfg.dipoles.radial1_au) << "\n";
  o << "dipole2 = " << format_double(cfg.dipoles.radial2_au) << "\n";
  o << "angular_factor = " << format_double(cfg.dipoles.angular_factor) << "\n";
  o << "beam_temperature = " << format_double(cfg.beam.temperature) << "\n";
  o << "atom_mass = " << format_double(cfg.beam.atom_mass) << "\n";
  o << "coupling = " << (cfg.coupling == CouplingMode::averaged ? "averaged" : "pairwise") << "\n";
  if (cfg.rho2res_peak) o << "rho2res_peak = " << format_double(*cfg.rho2res_peak) << "\n";
  o << "grid_points = " << cfg.grid.points << "\n";
  o << "detuning_min = " << format_double(cfg.grid.detuning_min) << "\n";
  o << "detuning_max = " << format_double(cfg.grid.detuning_max) << "\n";
  o << "field_center = " << format_double(cfg.grid.field_center) << "\n";
  o << "field_to_detuning = " << format_double(cfg.grid.field_to_detuning) << "\n";
  o << "shots = " << cfg.shots << "\n";
  o << "pulses = " << cfg.pulses << "\n";
  o << "seed = " << cfg.seed << "\n";
  o << "detector = " << (cfg.detector.enabled ? "on" : "off") << "\n";
  o << "detector_peaks = " << cfg.detector.peaks << "\n";
  o << "detector_spacing = " << format_double(cfg.detector.spacing) << "\n";
  o << "detector_width = " << format_double(cfg.detector.width1) << "\n";
  return o.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string s = emit_config(cfg);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rydsim
