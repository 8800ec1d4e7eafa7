#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace rydsim {

// Shared flag overrides for the run commands.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<long> shots;
  std::string out_dir = ".";
  int threads = 1;
  std::string format = "text";  // text | structured
};

// Each command returns a process exit code and reports errors on stderr.
int cmd_simulate(const std::string& config_path, const RunOptions& opt);
int cmd_predict(const std::string& config_path, const RunOptions& opt);
int cmd_estimate(const std::string& spectra_path, const std::string& histogram_path,
                 const RunOptions& opt);
int cmd_sweep(const std::string& config_path, const std::string& alpha_range,
              const std::string& beta_range, const RunOptions& opt);

}  // namespace rydsim
