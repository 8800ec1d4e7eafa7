#include "rydsim/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "rydsim/config.hpp"
#include "rydsim/estimator.hpp"
#include "rydsim/io.hpp"
#include "rydsim/montecarlo.hpp"
#include "rydsim/signal_model.hpp"

namespace rydsim {

namespace {

ExperimentConfig load_with_overrides(const std::string& path, const RunOptions& opt) {
  ExperimentConfig cfg = load_config(path);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.shots) cfg.shots = *opt.shots;
  cfg.validate();
  return cfg;
}

FileMeta meta_for(const ExperimentConfig& cfg) {
  FileMeta m;
  m.config_hash = config_hash(cfg);
  m.seed = cfg.seed;
  m.regime = cfg.motion == MotionRegime::frozen ? "frozen" : "beam";
  m.peak_model = cfg.motion == MotionRegime::frozen ? "sinc2" : "cusp";
  return m;
}

std::string out_path(const RunOptions& opt, const std::string& name) {
  std::filesystem::create_directories(opt.out_dir);
  return (std::filesystem::path(opt.out_dir) / name).string();
}

SignalInputs analytic_inputs(const ExperimentConfig& cfg, double detuning) {
  SignalInputs in;
  in.excitation = cfg.excitation;
  in.detection = DetectionModel(cfg.efficiency);
  in.background = cfg.background;
  in.pulses = cfg.pulses;
  if (cfg.motion == MotionRegime::frozen)
    in.rho2res = frozen_pair_probability(cfg.effective_mean_square(), cfg.interaction_time, detuning);
  else
    in.rho2res = detuning == 0.0 ? cfg.two_atom_peak() : 0.0;
  return in;
}

struct Range {
  double lo, hi;
  int count;
};

Range parse_range(const std::string& spec, const Range& fallback) {
  if (spec.empty()) return fallback;
  Range r{};
  char colon1 = 0, colon2 = 0;
  std::istringstream in(spec);
  if (!(in >> r.lo >> colon1 >> r.hi >> colon2 >> r.count) || colon1 != ':' || colon2 != ':' ||
      r.count < 1)
    throw std::runtime_error("bad range '" + spec + "' (expected lo:hi:count)");
  return r;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const InconsistentDataError& e) {
    std::cerr << "inconsistent data: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int cmd_simulate(const std::string& config_path, const RunOptions& opt) {
  return guarded([&]() {
    const ExperimentConfig cfg = load_with_overrides(config_path, opt);
    const auto meta = meta_for(cfg);
    const SweepResult result = sweep(cfg, opt.threads);
    write_file(out_path(opt, "spectra.tsv"), spectrum_to_text(result.spectrum, meta));

    // Pulse-height histogram from the detected-count marginal (which is
    // detuning independent), synthesized with a dedicated stream.
    const HistogramModel model = cfg.detector.model();
    std::vector<long> counts;
    for (std::size_t k = 1; k < result.detected_histogram.size(); ++k)
      for (long c = 0; c < result.detected_histogram[k]; ++c)
        counts.push_back(static_cast<long>(k));
    RandomStream rng(cfg.seed, 0xfeedbeefULL);
    const BinnedHistogram hist = synthesize_histogram(counts, model, rng);
    write_file(out_path(opt, "histogram.tsv"), histogram_to_text(hist, model, meta));

    // Peak amplitudes per channel at the grid point closest to resonance.
    std::size_t peak = 0;
    for (std::size_t g = 1; g < result.spectrum.detuning.size(); ++g)
      if (std::abs(result.spectrum.detuning[g]) < std::abs(result.spectrum.detuning[peak])) peak = g;
    std::ostringstream amp;
    amp << "# rydsim amplitudes\n# config: " << meta.config_hash << "\n# seed: " << meta.seed
        << "\n# columns: N S_N S_N_err\n";
    for (int n = 1; n <= result.spectrum.channels; ++n) {
      if (!result.spectrum.present[n - 1][peak]) continue;
      amp << n << "\t" << format_g17(result.spectrum.values[n - 1][peak]) << "\t"
          << format_g17(result.spectrum.errors[n - 1][peak]) << "\n";
    }
    write_file(out_path(opt, "amplitudes.tsv"), amp.str());

    if (result.clamped_pairs > 0)
      std::cerr << "warning: " << result.clamped_pairs
                << " pair probabilities clamped (perturbative breakdown)\n";
    return 0;
  });
}

int cmd_predict(const std::string& config_path, const RunOptions& opt) {
  return guarded([&]() {
    const ExperimentConfig cfg = load_with_overrides(config_path, opt);
    const auto meta = meta_for(cfg);
    constexpr int kChannels = 5;

    std::vector<double> grid;
    if (cfg.motion == MotionRegime::frozen) grid = cfg.detuning_grid();
    else grid = {0.0};  // no analytic beam line shape; peak value only

    SpectrumGrid s;
    s.detuning = grid;
    s.field.resize(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g)
      s.field[g] = cfg.grid.field_center + grid[g] / cfg.grid.field_to_detuning;
    s.channels = kChannels;
    s.values.assign(kChannels, std::vector<double>(grid.size(), 0.0));
    s.errors.assign(kChannels, std::vector<double>(grid.size(), 0.0));
    s.present.assign(kChannels, std::vector<char>(grid.size(), 1));
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const SignalInputs in = analytic_inputs(cfg, grid[g]);
      for (int n = 1; n <= kChannels; ++n) s.values[n - 1][g] = s_n_reduced(in, n);
    }
    write_file(out_path(opt, "spectra.tsv"), spectrum_to_text(s, meta));
    return 0;
  });
}

int cmd_estimate(const std::string& spectra_path, const std::string& histogram_path,
                 const RunOptions& opt) {
  return guarded([&]() {
    FileMeta meta;
    const SpectrumGrid grid = spectrum_from_text(read_file(spectra_path), &meta);
    PeakModel model = PeakModel::sinc2;
    if (meta.peak_model == "cusp") model = PeakModel::cusp;
    else if (meta.peak_model == "lorentzian") model = PeakModel::lorentzian;

    // Per-channel peak fits; A_N is the fitted background-free amplitude.
    std::vector<ValueWithError> amplitudes;
    std::vector<int> channels;
    std::vector<std::string> warnings;
    for (int n = 1; n <= grid.channels; ++n) {
      std::vector<double> x, y, yerr;
      for (std::size_t g = 0; g < grid.detuning.size(); ++g) {
        if (!grid.present[n - 1][g]) continue;
        x.push_back(grid.detuning[g]);
        y.push_back(grid.values[n - 1][g]);
        yerr.push_back(grid.errors[n - 1][g]);
      }
      if (x.size() < 5) continue;
      bool have_err = true;
      for (double e : yerr) have_err = have_err && e > 0.0;
      const PeakFit fit = fit_peak(x, y, have_err ? std::span<const double>(yerr)
                                                  : std::span<const double>(), model);
      if (!fit.converged) {
        warnings.push_back("channel " + std::to_string(n) + ": " + fit.diagnostics);
        continue;
      }
      amplitudes.push_back(fit.amplitude);
      channels.push_back(n);
    }
    if (channels.size() < 2 || channels[0] != 1 || channels[1] != 2)
      throw std::runtime_error("estimate: need fitted peaks in at least the S1 and S2 channels");

    HistogramModel hist_model;
    const BinnedHistogram hist = histogram_from_text(read_file(histogram_path), &hist_model);
    hist_model.validate();

    EstimateResult r = invert(alpha_from_amplitudes(amplitudes[0], amplitudes[1]),
                              beta_from_peak_integrals(peak_integrals(hist, hist_model), &warnings));
    r.rho2res = rho2_from_signals(amplitudes, channels, r.nbar.value, r.efficiency.value);
    r.warnings.insert(r.warnings.end(), warnings.begin(), warnings.end());

    const std::string report = opt.format == "structured" ? estimate_to_json(r)
                                                          : estimate_to_text(r);
    std::cout << report;
    write_file(out_path(opt, opt.format == "structured" ? "estimate.json" : "estimate.txt"),
               report);
    return 0;
  });
}

int cmd_sweep(const std::string& config_path, const std::string& alpha_range,
              const std::string& beta_range, const RunOptions& opt) {
  return guarded([&]() {
    const ExperimentConfig cfg = load_with_overrides(config_path, opt);
    const Range ar = parse_range(alpha_range, {0.0, 0.9, 10});
    const Range br = parse_range(beta_range, {0.2, 3.0, 15});
    std::ostringstream o;
    o << "# rydsim sweep\n# config: " << config_hash(cfg)
      << "\n# columns: alpha beta nbar efficiency\n";
    for (int i = 0; i < ar.count; ++i) {
      const double a = ar.count == 1 ? ar.lo : ar.lo + (ar.hi - ar.lo) * i / (ar.count - 1);
      for (int j = 0; j < br.count; ++j) {
        const double b = br.count == 1 ? br.lo : br.lo + (br.hi - br.lo) * j / (br.count - 1);
        if (a == 0.0 && b == 0.0) continue;
        const EstimateResult r = invert({a, 0.0}, {b, 0.0});
        o << format_g17(a) << "\t" << format_g17(b) << "\t" << format_g17(r.nbar.value) << "\t"
          << format_g17(r.efficiency.value) << "\n";
      }
    }
    write_file(out_path(opt, "sweep_table.tsv"), o.str());
    return 0;
  });
}

}  // namespace rydsim
