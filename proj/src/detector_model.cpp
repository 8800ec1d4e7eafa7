#include "rydsim/detector_model.hpp"

#include <cmath>
#include <stdexcept>

namespace rydsim {

namespace {

double gaussian_cdf(double x, double mean, double sigma) {
  if (sigma <= 0.0) return x >= mean ? 1.0 : 0.0;
  return 0.5 * std::erfc(-(x - mean) / (sigma * std::sqrt(2.0)));
}

}  // namespace

HistogramModel HistogramModel::equidistant(int peaks, double spacing, double width1) {
  if (peaks < 1) throw std::invalid_argument("histogram model needs at least one peak");
  if (!(spacing > 0.0) || !(width1 >= 0.0))
    throw std::invalid_argument("histogram model: bad spacing or width");
  HistogramModel m;
  for (int k = 1; k <= peaks; ++k) {
    m.centers.push_back(spacing * k);
    m.widths.push_back(width1 * std::sqrt(static_cast<double>(k)));
    m.windows.emplace_back(spacing * k - 0.5 * spacing, spacing * k + 0.5 * spacing);
  }
  return m;
}

HistogramModel HistogramModel::reference_preset(int peaks) {
  return equidistant(peaks, 0.4, 0.1);
}

void HistogramModel::validate() const {
  if (centers.empty() || centers.size() != widths.size() || centers.size() != windows.size())
    throw std::invalid_argument("histogram model: inconsistent peak arrays");
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (!(windows[i].first < windows[i].second))
      throw std::invalid_argument("histogram model: empty window");
    if (i > 0 && windows[i].first < windows[i - 1].second)
      throw std::invalid_argument("histogram model: windows must be disjoint and ordered");
  }
}

long BinnedHistogram::total() const {
  long t = 0;
  for (long c : counts) t += c;
  return t;
}

double sample_amplitude(long detected, const HistogramModel& model, RandomStream& rng) {
  if (detected < 1 || detected > model.max_atoms())
    throw std::invalid_argument("sample_amplitude: detected count outside modeled peaks");
  return rng.normal(model.centers[detected - 1], model.widths[detected - 1]);
}

BinnedHistogram synthesize_histogram(std::span<const long> detected_counts,
                                     const HistogramModel& model, RandomStream& rng,
                                     double bin_width) {
  model.validate();
  BinnedHistogram h;
  h.bin_width = bin_width;
  h.lo = 0.0;
  const double hi = model.centers.back() + 6.0 * model.widths.back() + model.centers.front();
  h.counts.assign(static_cast<std::size_t>(std::ceil(hi / bin_width)), 0);
  for (long k : detected_counts) {
    if (k < 1 || k > model.max_atoms()) continue;
    const double a = sample_amplitude(k, model, rng);
    const long bin = static_cast<long>(std::floor((a - h.lo) / bin_width));
    if (bin >= 0 && bin < static_cast<long>(h.counts.size())) ++h.counts[bin];
  }
  return h;
}

int assign_atom_number(double amplitude, const HistogramModel& model) {
  for (std::size_t i = 0; i < model.windows.size(); ++i)
    if (amplitude >= model.windows[i].first && amplitude < model.windows[i].second)
      return static_cast<int>(i) + 1;
  return 0;
}

std::vector<std::vector<double>> misassignment_matrix(const HistogramModel& model) {
  model.validate();
  const int peaks = model.max_atoms();
  std::vector<std::vector<double>> m(peaks, std::vector<double>(peaks + 1, 0.0));
  for (int k = 1; k <= peaks; ++k) {
    double assigned = 0.0;
    for (int n = 1; n <= peaks; ++n) {
      const auto& w = model.windows[n - 1];
      const double p = gaussian_cdf(w.second, model.centers[k - 1], model.widths[k - 1]) -
                       gaussian_cdf(w.first, model.centers[k - 1], model.widths[k - 1]);
      m[k - 1][n] = p;
      assigned += p;
    }
    m[k - 1][0] = 1.0 - assigned;  // outside every window
  }
  return m;
}

}  // namespace rydsim
