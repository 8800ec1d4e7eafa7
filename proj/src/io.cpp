#include "rydsim/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rydsim {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// Parses "# key: value" header lines into meta; returns false for
// non-header lines.
bool parse_header_line(const std::string& line, std::string& key, std::string& value) {
  if (line.empty() || line[0] != '#') return false;
  const auto colon = line.find(':');
  if (colon == std::string::npos) return false;
  key = line.substr(1, colon - 1);
  while (!key.empty() && key.front() == ' ') key.erase(key.begin());
  while (!key.empty() && key.back() == ' ') key.pop_back();
  value = line.substr(colon + 1);
  while (!value.empty() && value.front() == ' ') value.erase(value.begin());
  return true;
}

}  // namespace

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string spectrum_to_text(const SpectrumGrid& grid, const FileMeta& meta) {
  std::ostringstream o;
  o << "# rydsim spectrum\n";
  o << "# config: " << meta.config_hash << "\n";
  o << "# seed: " << meta.seed << "\n";
  o << "# regime: " << meta.regime << "\n";
  o << "# peak_model: " << meta.peak_model << "\n";
  o << "# channels: " << grid.channels << "\n";
  o << "# columns: field_Vcm detuning_rads";
  for (int n = 1; n <= grid.channels; ++n) o << " S" << n << " S" << n << "_err";
  o << "\n";
  for (std::size_t g = 0; g < grid.detuning.size(); ++g) {
    o << format_g17(grid.field.empty() ? 0.0 : grid.field[g]) << "\t"
      << format_g17(grid.detuning[g]);
    for (int n = 0; n < grid.channels; ++n) {
      const bool present = grid.present.empty() || grid.present[n][g];
      if (present) {
        o << "\t" << format_g17(grid.values[n][g]) << "\t"
          << format_g17(grid.errors.empty() || grid.errors[n].empty() ? 0.0 : grid.errors[n][g]);
      } else {
        o << "\tnan\tnan";
      }
    }
    o << "\n";
  }
  return o.str();
}

SpectrumGrid spectrum_from_text(const std::string& text, FileMeta* meta) {
  SpectrumGrid grid;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string key, value;
    if (parse_header_line(line, key, value)) {
      if (meta) {
        if (key == "config") meta->config_hash = value;
        else if (key == "seed") meta->seed = std::stoull(value);
        else if (key == "regime") meta->regime = value;
        else if (key == "peak_model") meta->peak_model = value;
      }
      if (key == "channels") grid.channels = std::stoi(value);
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    const auto tok = split_ws(line);
    if (grid.channels == 0) grid.channels = static_cast<int>((tok.size() - 2) / 2);
    if (tok.size() != static_cast<std::size_t>(2 + 2 * grid.channels))
      throw std::runtime_error("spectrum file: malformed row '" + line + "'");
    if (grid.values.empty()) {
      grid.values.assign(grid.channels, {});
      grid.errors.assign(grid.channels, {});
      grid.present.assign(grid.channels, {});
    }
    grid.field.push_back(std::stod(tok[0]));
    grid.detuning.push_back(std::stod(tok[1]));
    for (int n = 0; n < grid.channels; ++n) {
      const double v = std::stod(tok[2 + 2 * n]);
      const double e = std::stod(tok[3 + 2 * n]);
      grid.values[n].push_back(v);
      grid.errors[n].push_back(e);
      grid.present[n].push_back(std::isnan(v) ? 0 : 1);
    }
  }
  if (grid.detuning.empty()) throw std::runtime_error("spectrum file: no data rows");
  return grid;
}

std::string histogram_to_text(const BinnedHistogram& hist, const HistogramModel& model,
                              const FileMeta& meta) {
  std::ostringstream o;
  o << "# rydsim histogram\n";
  o << "# config: " << meta.config_hash << "\n";
  o << "# seed: " << meta.seed << "\n";
  o << "# bin_width: " << format_g17(hist.bin_width) << "\n";
  o << "# lo: " << format_g17(hist.lo) << "\n";
  o << "# centers:";
  for (double c : model.centers) o << " " << format_g17(c);
  o << "\n# widths:";
  for (double w : model.widths) o << " " << format_g17(w);
  o << "\n# windows:";
  for (const auto& w : model.windows) o << " " << format_g17(w.first) << ":" << format_g17(w.second);
  o << "\n# columns: bin_lo count\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i)
    o << format_g17(hist.lo + static_cast<double>(i) * hist.bin_width) << "\t" << hist.counts[i]
      << "\n";
  return o.str();
}

BinnedHistogram histogram_from_text(const std::string& text, HistogramModel* model,
                                    FileMeta* meta) {
  BinnedHistogram hist;
  HistogramModel m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string key, value;
    if (parse_header_line(line, key, value)) {
      if (key == "bin_width") hist.bin_width = std::stod(value);
      else if (key == "lo") hist.lo = std::stod(value);
      else if (key == "centers")
        for (const auto& t : split_ws(value)) m.centers.push_back(std::stod(t));
      else if (key == "widths")
        for (const auto& t : split_ws(value)) m.widths.push_back(std::stod(t));
      else if (key == "windows") {
        for (const auto& t : split_ws(value)) {
          const auto colon = t.find(':');
          if (colon == std::string::npos) throw std::runtime_error("histogram file: bad window");
          m.windows.emplace_back(std::stod(t.substr(0, colon)), std::stod(t.substr(colon + 1)));
        }
      } else if (meta) {
        if (key == "config") meta->config_hash = value;
        else if (key == "seed") meta->seed = std::stoull(value);
      }
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    const auto tok = split_ws(line);
    if (tok.size() != 2) throw std::runtime_error("histogram file: malformed row '" + line + "'");
    hist.counts.push_back(std::stol(tok[1]));
  }
  if (hist.counts.empty()) throw std::runtime_error("histogram file: no data rows");
  if (model) *model = m;
  return hist;
}

std::string estimate_to_text(const EstimateResult& r) {
  std::ostringstream o;
  const auto row = [&](const char* name, const ValueWithError& v) {
    o << name << " = " << format_g17(v.value) << " +- " << format_g17(v.error) << "\n";
  };
  o << "# rydsim estimate\n";
  row("alpha", r.alpha);
  row("beta", r.beta);
  row("nbar", r.nbar);
  row("efficiency", r.efficiency);
  row("rho2res", r.rho2res);
  for (const auto& w : r.warnings) o << "# warning: " << w << "\n";
  return o.str();
}

std::string estimate_to_json(const EstimateResult& r) {
  nlohmann::json j;
  const auto item = [](const ValueWithError& v) {
    return nlohmann::json{{"value", v.value}, {"error", v.error}};
  };
  j["alpha"] = item(r.alpha);
  j["beta"] = item(r.beta);
  j["nbar"] = item(r.nbar);
  j["efficiency"] = item(r.efficiency);
  j["rho2res"] = item(r.rho2res);
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace rydsim
