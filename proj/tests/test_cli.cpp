#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "rydsim/commands.hpp"
#include "rydsim/config.hpp"
#include "rydsim/io.hpp"
#include "rydsim/signal_model.hpp"

using namespace rydsim;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rydsim_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kSmallConfig =
    "# comment line\n"
    "regime = frozen\n"
    "excitation = weak\n"
    "nbar = 2.0\n"
    "efficiency = 0.5\n"
    "background = 0.01\n"
    "interaction_time = 3e-6\n"
    "coupling = averaged\n"
    "rho2res_peak = 0.02\n"
    "grid_points = 21\n"
    "detuning_min = -4e6\n"
    "detuning_max = 4e6\n"
    "shots = 20000\n"
    "seed = 77\n";

}  // namespace

TEST_CASE("config round trip and hashing") {
  const ExperimentConfig cfg = parse_config(kSmallConfig);
  CHECK(cfg.excitation.nbar == doctest::Approx(2.0));
  CHECK(cfg.efficiency == doctest::Approx(0.5));
  CHECK(cfg.seed == 77);
  REQUIRE(cfg.rho2res_peak.has_value());
  CHECK(*cfg.rho2res_peak == doctest::Approx(0.02));

  const std::string canonical = emit_config(cfg);
  const ExperimentConfig again = parse_config(canonical);
  CHECK(emit_config(again) == canonical);
  CHECK(config_hash(again) == config_hash(cfg));

  ExperimentConfig other = cfg;
  other.seed = 78;
  CHECK(config_hash(other) != config_hash(cfg));
}

TEST_CASE("config parse errors carry line numbers") {
  try {
    parse_config("regime = frozen\nbogus_key = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
  }

  try {
    parse_config("nbar = 2\nnbar = 3\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line == 2);
  }

  try {
    parse_config("regime = frozen\n\nefficiency = fast\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line == 3);
  }

  CHECK_THROWS_AS(parse_config("efficiency = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("regime = beam\ncoupling = averaged\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("excitation = strong\n"), ConfigError);
}

TEST_CASE("spectrum serialization round trip") {
  SpectrumGrid g;
  g.detuning = {-1e6, 0.0, 1e6};
  g.field = {6.36, 6.37, 6.38};
  g.channels = 2;
  g.values = {{0.1, 0.2, 0.1}, {0.3, 0.4, 0.3}};
  g.errors = {{0.01, 0.01, 0.01}, {0.02, 0.02, 0.02}};
  g.present = {{1, 1, 1}, {1, 1, 0}};
  FileMeta meta{"abc123", 42, "frozen", "sinc2"};

  FileMeta back_meta;
  const SpectrumGrid back = spectrum_from_text(spectrum_to_text(g, meta), &back_meta);
  CHECK(back_meta.config_hash == "abc123");
  CHECK(back_meta.seed == 42);
  CHECK(back_meta.peak_model == "sinc2");
  REQUIRE(back.channels == 2);
  REQUIRE(back.detuning.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.detuning[i] == g.detuning[i]);
    CHECK(back.field[i] == g.field[i]);
    for (int n = 0; n < 2; ++n) {
      CHECK(back.present[n][i] == g.present[n][i]);
      if (g.present[n][i]) {
        CHECK(back.values[n][i] == g.values[n][i]);
        CHECK(back.errors[n][i] == g.errors[n][i]);
      }
    }
  }
}

TEST_CASE("histogram serialization round trip") {
  BinnedHistogram h;
  h.lo = 0.0;
  h.bin_width = 0.02;
  h.counts = {0, 5, 9, 1, 0, 3};
  const HistogramModel model = HistogramModel::reference_preset();
  FileMeta meta{"deadbeef", 7, "frozen", "sinc2"};

  HistogramModel back_model;
  FileMeta back_meta;
  const BinnedHistogram back =
      histogram_from_text(histogram_to_text(h, model, meta), &back_model, &back_meta);
  CHECK(back.bin_width == h.bin_width);
  CHECK(back.counts == h.counts);
  CHECK(back_model.centers == model.centers);
  CHECK(back_model.windows == model.windows);
  CHECK(back_meta.config_hash == "deadbeef");
}

TEST_CASE("predict writes the analytic spectrum") {
  const auto dir = fresh_dir("predict");
  write_file((dir / "run.cfg").string(), kSmallConfig);
  RunOptions opt;
  opt.out_dir = (dir / "out").string();
  REQUIRE(cmd_predict((dir / "run.cfg").string(), opt) == 0);

  const SpectrumGrid s = spectrum_from_text(read_file((dir / "out" / "spectra.tsv").string()));
  REQUIRE(s.channels == 5);
  REQUIRE(s.detuning.size() == 21);

  const ExperimentConfig cfg = parse_config(kSmallConfig);
  SignalInputs in;
  in.excitation = cfg.excitation;
  in.detection = DetectionModel(cfg.efficiency);
  in.background = cfg.background;
  // On resonance the scaling amplitude equals the configured peak.
  in.rho2res = *cfg.rho2res_peak;
  const std::size_t mid = 10;
  CHECK(s.detuning[mid] == doctest::Approx(0.0));
  for (int n = 1; n <= 5; ++n)
    CHECK(s.values[n - 1][mid] == doctest::Approx(s_n_reduced(in, n)).epsilon(1e-12));
  // Wings fall back to the background level.
  CHECK(s.values[1][0] < s.values[1][mid]);
}

TEST_CASE("simulate is deterministic and thread-count independent") {
  const auto dir = fresh_dir("simulate");
  write_file((dir / "run.cfg").string(), kSmallConfig);

  RunOptions a;
  a.out_dir = (dir / "a").string();
  a.shots = 3000;
  a.threads = 1;
  RunOptions b = a;
  b.out_dir = (dir / "b").string();
  b.threads = 4;
  REQUIRE(cmd_simulate((dir / "run.cfg").string(), a) == 0);
  REQUIRE(cmd_simulate((dir / "run.cfg").string(), b) == 0);
  for (const char* name : {"spectra.tsv", "histogram.tsv", "amplitudes.tsv"}) {
    const std::string fa = read_file((fs::path(a.out_dir) / name).string());
    const std::string fb = read_file((fs::path(b.out_dir) / name).string());
    CHECK(fa == fb);
    CHECK(!fa.empty());
  }
}

TEST_CASE("estimate recovers the configured parameters end to end") {
  const auto dir = fresh_dir("estimate");
  write_file((dir / "run.cfg").string(), kSmallConfig);

  RunOptions sim;
  sim.out_dir = (dir / "out").string();
  sim.shots = 40000;
  sim.threads = 2;
  REQUIRE(cmd_simulate((dir / "run.cfg").string(), sim) == 0);

  RunOptions est;
  est.out_dir = (dir / "out").string();
  est.format = "structured";
  REQUIRE(cmd_estimate((fs::path(sim.out_dir) / "spectra.tsv").string(),
                       (fs::path(sim.out_dir) / "histogram.tsv").string(), est) == 0);

  const auto j = nlohmann::json::parse(read_file((dir / "out" / "estimate.json").string()));
  // The true values are nbar = 2 and T = 0.5; allow generous statistical and
  // pulse-height assignment slack.
  CHECK(std::abs(j["nbar"]["value"].get<double>() - 2.0) < 0.4);
  CHECK(std::abs(j["efficiency"]["value"].get<double>() - 0.5) < 0.1);
  CHECK(std::abs(j["rho2res"]["value"].get<double>() - 0.02) < 0.005);
  CHECK(j["nbar"]["error"].get<double>() > 0.0);

  // Text report variant.
  est.format = "text";
  REQUIRE(cmd_estimate((fs::path(sim.out_dir) / "spectra.tsv").string(),
                       (fs::path(sim.out_dir) / "histogram.tsv").string(), est) == 0);
  const std::string text = read_file((dir / "out" / "estimate.txt").string());
  CHECK(text.find("nbar") != std::string::npos);
}

TEST_CASE("sweep emits an inversion table") {
  const auto dir = fresh_dir("sweep");
  write_file((dir / "run.cfg").string(), kSmallConfig);
  RunOptions opt;
  opt.out_dir = (dir / "out").string();
  REQUIRE(cmd_sweep((dir / "run.cfg").string(), "0.1:0.5:3", "0.5:1.5:3", opt) == 0);
  const std::string table = read_file((dir / "out" / "sweep_table.tsv").string());
  // Header plus 9 rows.
  int rows = 0;
  for (char c : table)
    if (c == '\n') ++rows;
  CHECK(rows == 3 + 9);
  CHECK(cmd_sweep((dir / "run.cfg").string(), "nonsense", "", opt) == 1);
}

TEST_CASE("commands report failures through exit codes") {
  RunOptions opt;
  opt.out_dir = (fresh_dir("fail")).string();
  CHECK(cmd_simulate("/nonexistent/path.cfg", opt) == 1);
  CHECK(cmd_predict("/nonexistent/path.cfg", opt) == 1);
  CHECK(cmd_estimate("/nonexistent/a.tsv", "/nonexistent/b.tsv", opt) == 1);
}
