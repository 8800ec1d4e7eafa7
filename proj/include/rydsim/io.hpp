#pragma once

#include <string>

#include "rydsim/detector_model.hpp"
#include "rydsim/estimator.hpp"
#include "rydsim/signal_model.hpp"

namespace rydsim {

// Metadata carried in every output file header so re-runs are traceable and
// byte-comparable.
struct FileMeta {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string regime;      // frozen | beam
  std::string peak_model;  // sinc2 | cusp | lorentzian (hint for the estimator)
};

std::string spectrum_to_text(const SpectrumGrid& grid, const FileMeta& meta);
SpectrumGrid spectrum_from_text(const std::string& text, FileMeta* meta = nullptr);

std::string histogram_to_text(const BinnedHistogram& hist, const HistogramModel& model,
                              const FileMeta& meta);
BinnedHistogram histogram_from_text(const std::string& text, HistogramModel* model = nullptr,
                                    FileMeta* meta = nullptr);

std::string estimate_to_text(const EstimateResult& r);
std::string estimate_to_json(const EstimateResult& r);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// 17-significant-digit decimal representation (bit-exact double round trip).
std::string format_g17(double v);

}  // namespace rydsim
