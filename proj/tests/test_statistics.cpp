#include <doctest.h>

#include <cmath>
#include <vector>

#include "rydsim/statistics.hpp"
#include "test_util.hpp"

using namespace rydsim;

TEST_CASE("excitation pmf basics") {
  CHECK(excitation_pmf(ExcitationModel::weak(0.0), 0) == doctest::Approx(1.0));
  CHECK(excitation_pmf(ExcitationModel::weak(0.0), 3) == doctest::Approx(0.0));

  // Direct binomial evaluation.
  const double expected = 10.0 * 0.3 * 0.3 * 0.7 * 0.7 * 0.7;
  CHECK(excitation_pmf(ExcitationModel::strong(5, 0.3), 2) == doctest::Approx(expected).epsilon(1e-12));

  // Poisson ratio identity: pmf(2)/pmf(1) = mean/2.
  const auto m = ExcitationModel::weak(2.2);
  CHECK(excitation_pmf(m, 2) / excitation_pmf(m, 1) == doctest::Approx(1.1).epsilon(1e-12));
}

TEST_CASE("excitation model parameter domain") {
  CHECK_THROWS_AS(ExcitationModel::weak(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(ExcitationModel::strong(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ExcitationModel::strong(5, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(DetectionModel(0.0), std::invalid_argument);
  CHECK_THROWS_AS(DetectionModel(1.2), std::invalid_argument);
  CHECK_THROWS_AS(excitation_pmf(ExcitationModel::strong(5, 0.3), 6), std::invalid_argument);
}

TEST_CASE("detected pmf: ideal detector and enumeration oracle") {
  const auto weak = ExcitationModel::weak(4.0);
  const DetectionModel ideal(1.0);
  for (long n = 0; n < 12; ++n)
    CHECK(detected_pmf(weak, ideal, n) == doctest::Approx(excitation_pmf(weak, n)).epsilon(1e-14));

  // Exhaustive enumeration over all 2^5 excitation patterns x detection
  // outcomes.
  const auto strong = ExcitationModel::strong(5, 0.4);
  const DetectionModel det(0.5);
  const auto oracle = testutil::brute_force(5, 0.4, 0.5, std::vector<double>(6, 0.0), 1);
  for (long n = 0; n <= 5; ++n)
    CHECK(detected_pmf(strong, det, n) == doctest::Approx(oracle.detected_pmf[n]).epsilon(1e-12));

  // Histogram peak-integral ratio at nbar*T = 0.6.
  const auto m = ExcitationModel::weak(1.0);
  const DetectionModel t(0.6);
  CHECK(detected_pmf(m, t, 2) / detected_pmf(m, t, 1) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("normalization invariants") {
  const auto strong = ExcitationModel::strong(37, 0.23);
  double sum = 0.0;
  for (long n = 0; n <= 37; ++n) sum += excitation_pmf(strong, n);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

  const auto weak = ExcitationModel::weak(3.7);
  const long nmax = poisson_truncation_bound(3.7, 1e-12);
  double cum = 0.0;
  for (long n = 0; n <= nmax; ++n) cum += excitation_pmf(weak, n);
  CHECK(cum >= 1.0 - 1e-12);
}

TEST_CASE("thinning identity term by term") {
  // The detected pmf must equal sum_i P_i binomial(i, N, T).
  const double nbar = 2.7;
  const double t = 0.37;
  const auto weak = ExcitationModel::weak(nbar);
  const DetectionModel det(t);
  const long imax = poisson_truncation_bound(nbar, 1e-16) + 20;
  for (long n = 0; n <= 8; ++n) {
    double acc = 0.0;
    for (long i = n; i <= imax; ++i)
      acc += excitation_pmf(weak, i) * binomial_pmf(i, t, n);
    CHECK(detected_pmf(weak, det, n) == doctest::Approx(acc).epsilon(1e-12));
  }
}

TEST_CASE("strong to weak limit") {
  const double nbar = 2.0;
  const long n0 = 10000;
  const auto strong = ExcitationModel::strong(n0, nbar / n0);
  const auto weak = ExcitationModel::weak(nbar);
  const DetectionModel det(0.8);
  double max_diff = 0.0;
  for (long n = 0; n <= 20; ++n)
    max_diff = std::max(max_diff, std::abs(detected_pmf(strong, det, n) - detected_pmf(weak, det, n)));
  CHECK(max_diff < 1e-3);
}

TEST_CASE("mean of the detected distribution") {
  const auto weak = ExcitationModel::weak(3.1);
  const DetectionModel det(0.44);
  double mean = 0.0;
  for (long n = 0; n <= poisson_truncation_bound(3.1, 1e-16) + 10; ++n)
    mean += static_cast<double>(n) * detected_pmf(weak, det, n);
  CHECK(mean == doctest::Approx(3.1 * 0.44).epsilon(1e-9));

  const auto strong = ExcitationModel::strong(40, 0.3);
  mean = 0.0;
  for (long n = 0; n <= 40; ++n) mean += static_cast<double>(n) * detected_pmf(strong, det, n);
  CHECK(mean == doctest::Approx(40 * 0.3 * 0.44).epsilon(1e-9));
}

TEST_CASE("sampling trivial limits") {
  RandomStream rng(7, 0);
  for (int k = 0; k < 100; ++k) {
    CHECK(sample_excited_count(ExcitationModel::weak(0.0), rng) == 0);
    CHECK(sample_excited_count(ExcitationModel::strong(9, 1.0), rng) == 9);
  }
  CHECK(thin_count(0, 0.3, rng) == 0);
  CHECK(thin_count(17, 1.0, rng) == 17);
}

TEST_CASE("sampling law of large numbers") {
  RandomStream rng(42, 1);
  const auto m = ExcitationModel::weak(2.2);
  const long samples = 1000000;
  double sum = 0.0;
  for (long k = 0; k < samples; ++k) sum += static_cast<double>(sample_excited_count(m, rng));
  const double mean = sum / static_cast<double>(samples);
  const double sigma = std::sqrt(2.2 / static_cast<double>(samples));
  CHECK(std::abs(mean - 2.2) < 3.0 * sigma);
}

TEST_CASE("thinning theorem: Poisson(nbar) thinned by T is Poisson(nbar T)") {
  RandomStream rng(42, 2);
  const auto m = ExcitationModel::weak(3.0);
  const long samples = 1000000;
  std::vector<long> counts(32, 0);
  for (long k = 0; k < samples; ++k) {
    const long i = sample_excited_count(m, rng);
    const long d = thin_count(i, 0.4, rng);
    ++counts[std::min<long>(d, 31)];
  }
  // Chi-square against Poisson(1.2), tail pooled.
  const double mean = 1.2;
  double stat = 0.0;
  int bins = 0;
  double tail_expected = static_cast<double>(samples);
  long tail_observed = samples;
  for (long n = 0; n < 31; ++n) {
    const double e = static_cast<double>(samples) * poisson_pmf(mean, n);
    if (e < 10.0) break;
    stat += std::pow(static_cast<double>(counts[n]) - e, 2) / e;
    tail_expected -= e;
    tail_observed -= counts[n];
    ++bins;
  }
  if (tail_expected > 0.0)
    stat += std::pow(static_cast<double>(tail_observed) - tail_expected, 2) / tail_expected;
  CHECK(testutil::chi_square_p(stat, bins) > 0.01);
}

TEST_CASE("rng streams are reproducible and independent of draw order") {
  RandomStream a(123, 55);
  RandomStream b(123, 55);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  RandomStream c(123, 56);
  bool differs = false;
  RandomStream a2(123, 55);
  for (int i = 0; i < 16; ++i) differs = differs || (a2.next_u64() != c.next_u64());
  CHECK(differs);
}
