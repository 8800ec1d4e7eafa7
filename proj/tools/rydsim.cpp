// Command-line front end: simulate | predict | estimate | sweep.

#include <CLI11.hpp>

#include "rydsim/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Post-selected multiatom signals of resonant Rydberg collisions: "
               "simulation, analytic prediction, and parameter estimation"};
  app.require_subcommand(1);

  rydsim::RunOptions opt;
  std::string config_path, spectra_path, histogram_path;
  std::string alpha_range, beta_range;
  std::uint64_t seed = 0;
  long shots = 0;

  const auto add_common = [&](CLI::App* sub, bool wants_config) {
    if (wants_config) sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--format", opt.format, "report format: text | structured")
        ->check(CLI::IsMember({"text", "structured"}));
  };

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run producing spectra and histogram");
  add_common(simulate, true);
  simulate->add_option("--seed", seed, "override the config seed");
  simulate->add_option("--shots", shots, "override the shot count");
  simulate->add_option("--threads", opt.threads, "worker threads (never changes results)");

  auto* predict = app.add_subcommand("predict", "analytic spectra from the signal model");
  add_common(predict, true);

  auto* estimate = app.add_subcommand("estimate", "invert measured spectra and histogram");
  estimate->add_option("--spectra", spectra_path, "spectrum file")->required();
  estimate->add_option("--histogram", histogram_path, "pulse-height histogram file")->required();
  add_common(estimate, false);

  auto* sweep = app.add_subcommand("sweep", "tabulate nbar(alpha,beta) and T(alpha,beta)");
  add_common(sweep, true);
  sweep->add_option("--alpha", alpha_range, "alpha grid as lo:hi:count");
  sweep->add_option("--beta", beta_range, "beta grid as lo:hi:count");

  CLI11_PARSE(app, argc, argv);

  if (simulate->count("--seed")) opt.seed = seed;
  if (simulate->count("--shots")) opt.shots = shots;

  if (*simulate) return rydsim::cmd_simulate(config_path, opt);
  if (*predict) return rydsim::cmd_predict(config_path, opt);
  if (*estimate) return rydsim::cmd_estimate(spectra_path, histogram_path, opt);
  if (*sweep) return rydsim::cmd_sweep(config_path, alpha_range, beta_range, opt);
  return 1;
}
