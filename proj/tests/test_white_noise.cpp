#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <vector>

#include "fspde/white_noise.hpp"

using namespace fspde;

namespace {

Scalar normal_cdf(Scalar x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Two-sided Kolmogorov-Smirnov statistic against the standard normal.
Scalar ks_statistic(std::vector<Scalar> sample) {
  std::sort(sample.begin(), sample.end());
  const Scalar n = static_cast<Scalar>(sample.size());
  Scalar d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const Scalar cdf = normal_cdf(sample[i]);
    d = std::max(d, (static_cast<Scalar>(i) + 1.0) / n - cdf);
    d = std::max(d, cdf - static_cast<Scalar>(i) / n);
  }
  return d;
}

}  // namespace

TEST_CASE("mode count") {
  CHECK(mode_count(std::pow(2.0, -3)) == 9);
  CHECK(mode_count(std::pow(2.0, -5)) == 33);
  CHECK(mode_count(1.0 / 3.0) == 4);
  CHECK_THROWS_AS(mode_count(0.0), std::invalid_argument);
  CHECK_THROWS_AS(mode_count(1.0), std::invalid_argument);
  for (int k = 1; k <= 12; ++k) {
    const Scalar h = std::pow(2.0, -k);
    CHECK(static_cast<Scalar>(mode_count(h)) >= 1.0 / h);
  }
}

TEST_CASE("determinism and stream extension") {
  const NoiseConfig cfg{9, 64, 0.125, 0xABCDEF12u, 3};
  const NoisePath a = sample_path(cfg);
  const NoisePath b = sample_path(cfg);
  CHECK(a.increments == b.increments);

  SUBCASE("more modes extend without disturbing existing ones") {
    NoiseConfig wide = cfg;
    wide.num_modes = 17;
    const NoisePath w = sample_path(wide);
    CHECK(w.increments.topRows(9) == a.increments);
  }

  SUBCASE("more steps extend without disturbing existing ones") {
    NoiseConfig longer = cfg;
    longer.num_steps = 128;
    const NoisePath l = sample_path(longer);
    CHECK(l.increments.leftCols(64) == a.increments);
  }

  SUBCASE("different realizations differ") {
    NoiseConfig other = cfg;
    other.realization_index = 4;
    CHECK(sample_path(other).increments != a.increments);
  }
}

TEST_CASE("sample statistics of the increments") {
  const Scalar tau = 0.03125;
  const NoiseConfig cfg{10, 10000, tau, 2026, 0};
  const NoisePath path = sample_path(cfg);
  const Scalar n = static_cast<Scalar>(path.increments.size());

  const Scalar mean = path.increments.mean();
  const Scalar sigma = std::sqrt(tau);
  CHECK(std::abs(mean) <= 4.0 * sigma / std::sqrt(n));

  const Scalar var =
      (path.increments.array() - mean).square().sum() / (n - 1.0);
  CHECK(var == doctest::Approx(tau).epsilon(0.05));
}

TEST_CASE("Kolmogorov-Smirnov at the 1% level") {
  const Scalar tau = 0.25;
  const NoiseConfig cfg{5, 2000, tau, 77, 0};
  const NoisePath path = sample_path(cfg);
  std::vector<Scalar> normalized;
  normalized.reserve(10000);
  for (int j = 0; j < 5; ++j) {
    for (int m = 0; m < 2000; ++m) {
      normalized.push_back(path.increments(j, m) / std::sqrt(tau));
    }
  }
  const Scalar critical = 1.628 / std::sqrt(10000.0);
  CHECK(ks_statistic(std::move(normalized)) < critical);
}

TEST_CASE("cross-mode independence") {
  // Concatenating M realizations gives per-mode streams of length M*N, the
  // sample size behind the 4 / sqrt(M N) (i.e. 4 sigma) correlation bound.
  const int modes = 9, steps = 512;
  Matrix streams(modes, modes * steps);
  for (int r = 0; r < modes; ++r) {
    const NoisePath path = sample_path(
        NoiseConfig{modes, steps, 1.0, 99, static_cast<std::uint64_t>(r)});
    streams.middleCols(r * steps, steps) = path.increments;
  }
  const Scalar len = static_cast<Scalar>(modes * steps);
  const Scalar bound = 4.0 / std::sqrt(len);
  for (int j = 0; j < modes; ++j) {
    for (int k = j + 1; k < modes; ++k) {
      const auto x = streams.row(j).array() - streams.row(j).mean();
      const auto y = streams.row(k).array() - streams.row(k).mean();
      const Scalar corr =
          (x * y).sum() / std::sqrt((x * x).sum() * (y * y).sum());
      CAPTURE(j);
      CAPTURE(k);
      CHECK(std::abs(corr) < bound);
    }
  }
}

TEST_CASE("time coarsening") {
  const NoiseConfig cfg{3, 8, 0.125, 5, 1};
  const NoisePath path = sample_path(cfg);

  SUBCASE("factor one is the identity") {
    const NoisePath same = coarsen_in_time(path, 1);
    CHECK(same.increments == path.increments);
    CHECK(same.config.tau == path.config.tau);
  }

  SUBCASE("factor two sums adjacent increments exactly") {
    const NoisePath halved = coarsen_in_time(path, 2);
    CHECK(halved.config.num_steps == 4);
    CHECK(halved.config.tau == 0.25);
    for (int j = 0; j < 3; ++j) {
      for (int m = 0; m < 4; ++m) {
        CHECK(halved.increments(j, m) ==
              path.increments(j, 2 * m) + path.increments(j, 2 * m + 1));
      }
    }
  }

  SUBCASE("non-divisible factor rejected") {
    CHECK_THROWS_AS(coarsen_in_time(path, 3), std::invalid_argument);
  }

  SUBCASE("coarsened variance doubles") {
    const Scalar tau = 0.0625;
    const NoisePath fine = sample_path(NoiseConfig{4, 50000, tau, 11, 0});
    const NoisePath coarse = coarsen_in_time(fine, 2);
    const Scalar n = static_cast<Scalar>(coarse.increments.size());
    const Scalar mean = coarse.increments.mean();
    const Scalar var =
        (coarse.increments.array() - mean).square().sum() / (n - 1.0);
    CHECK(var == doctest::Approx(2.0 * tau).epsilon(0.05));
  }
}

TEST_CASE("binary dump and reload") {
  const NoiseConfig cfg{7, 33, 0.4375, 0xDEADBEEFCAFEull, 12};
  const NoisePath path = sample_path(cfg);

  std::stringstream buffer;
  write_noise_path(path, buffer);
  const NoisePath reloaded = read_noise_path(buffer);
  CHECK(reloaded.increments == path.increments);
  CHECK(reloaded.config.num_modes == cfg.num_modes);
  CHECK(reloaded.config.num_steps == cfg.num_steps);
  CHECK(reloaded.config.tau == cfg.tau);
  CHECK(reloaded.config.master_seed == cfg.master_seed);
  CHECK(reloaded.config.realization_index == cfg.realization_index);

  SUBCASE("file round trip") {
    const std::string file = "noise_roundtrip.bin";
    save_noise_path(path, file);
    const NoisePath from_file = load_noise_path(file);
    CHECK(from_file.increments == path.increments);
    std::filesystem::remove(file);
  }

  SUBCASE("bad magic rejected") {
    std::stringstream bad;
    bad << "NOTANOIS" << std::string(64, '\0');
    CHECK_THROWS_AS(read_noise_path(bad), std::invalid_argument);
  }

  SUBCASE("truncated body rejected") {
    std::stringstream truncated;
    write_noise_path(path, truncated);
    std::string bytes = truncated.str();
    bytes.resize(bytes.size() - 8);
    std::stringstream cut(bytes);
    CHECK_THROWS_AS(read_noise_path(cut), std::invalid_argument);
  }
}
