#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "specstat/ratio_stats.hpp"
#include "specstat/rng.hpp"
#include "specstat/spectrum.hpp"
#include "synthetic.hpp"

using specstat::cdf_distance;
using specstat::fit_beta_prime;
using specstat::histogram;
using specstat::ks_test;
using specstat::kth_spacing_ratios;
using specstat::predicted_beta_prime;
using specstat::RatioMode;
using specstat::RatioSequence;
using specstat::RngStream;
using specstat::Spectrum;
using specstat::surmise_cdf;
using specstat::surmise_mean;
using specstat::surmise_params;
using specstat::surmise_pdf;
using specstat::SurmiseParams;

namespace {

Spectrum line(std::vector<double> levels) {
  return Spectrum{std::move(levels), specstat::SpectrumKind::line};
}

}  // namespace

// --- ratio transform -------------------------------------------------------

TEST_CASE("doubling spectrum gives constant ratios") {
  const auto rs = kth_spacing_ratios(line({0, 1, 3, 7, 15}), 1);
  REQUIRE(rs.values == std::vector<double>{2, 2, 2});
}

TEST_CASE("k=2 on the doubling spectrum") {
  const auto rs = kth_spacing_ratios(line({0, 1, 3, 7, 15}), 2);
  REQUIRE(rs.values == std::vector<double>{4});
}

TEST_CASE("equally spaced levels give unit ratios") {
  const auto rs = kth_spacing_ratios(line({0, 1, 2, 3, 4, 5, 6}), 3);
  REQUIRE(rs.values == std::vector<double>{1});
}

TEST_CASE("strided mode shares one spacing between neighbors") {
  const auto rs =
      kth_spacing_ratios(line({0, 1, 3, 7, 15, 31, 63}), 2, RatioMode::strided);
  REQUIRE(rs.values == std::vector<double>{4, 4});
}

TEST_CASE("ratio sequence lengths") {
  RngStream rng(17, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 20 + static_cast<std::size_t>(rng.uniform(0, 200));
    const int k = 1 + static_cast<int>(rng.uniform(0, 6));
    if (n < static_cast<std::size_t>(2 * k + 1)) continue;
    std::vector<double> levels(n);
    double x = 0;
    for (auto& v : levels) v = (x += rng.uniform() + 1e-6);
    const auto sliding = kth_spacing_ratios(line(levels), k, RatioMode::sliding);
    const auto strided = kth_spacing_ratios(line(levels), k, RatioMode::strided);
    REQUIRE(sliding.values.size() == n - 2 * static_cast<std::size_t>(k));
    REQUIRE(strided.values.size() == (n - 1) / static_cast<std::size_t>(k) - 1);
  }
}

TEST_CASE("k=1 sliding and strided coincide exactly") {
  RngStream rng(18, 0);
  std::vector<double> levels(50);
  double x = 0;
  for (auto& v : levels) v = (x += rng.uniform());
  const auto a = kth_spacing_ratios(line(levels), 1, RatioMode::sliding);
  const auto b = kth_spacing_ratios(line(levels), 1, RatioMode::strided);
  REQUIRE(a.values == b.values);
}

TEST_CASE("dyadic affine maps leave ratios bitwise unchanged") {
  const std::vector<double> base{0, 1, 3, 7, 15, 31, 63};
  std::vector<double> mapped;
  for (double v : base) mapped.push_back(4.0 * v - 2.0);
  for (int k : {1, 2}) {
    for (auto mode : {RatioMode::sliding, RatioMode::strided}) {
      const auto a = kth_spacing_ratios(line(base), k, mode);
      const auto b = kth_spacing_ratios(line(mapped), k, mode);
      REQUIRE(a.values == b.values);
    }
  }
}

TEST_CASE("generic affine maps leave ratios unchanged to rounding") {
  RngStream rng(19, 0);
  std::vector<double> levels(200);
  double x = 0;
  for (auto& v : levels) v = (x += rng.uniform() + 0.01);
  std::vector<double> mapped;
  for (double v : levels) mapped.push_back(3.7 * v - 2.0);
  for (int k : {1, 2, 3}) {
    const auto a = kth_spacing_ratios(line(levels), k);
    const auto b = kth_spacing_ratios(line(mapped), k);
    for (std::size_t i = 0; i < a.values.size(); ++i)
      REQUIRE(b.values[i] == Catch::Approx(a.values[i]).epsilon(1e-12));
  }
}

TEST_CASE("ratio transform error paths") {
  REQUIRE_THROWS_AS(kth_spacing_ratios(line({0, 1, 2, 3}), 2),
                    specstat::TooFewLevelsError);
  REQUIRE_THROWS_AS(kth_spacing_ratios(line({0, 1, 1, 2, 3}), 1),
                    specstat::DegenerateSpacingError);
  REQUIRE_THROWS_AS(kth_spacing_ratios(line({0, 1, 2}), 0), specstat::ConfigError);
}

TEST_CASE("cyclic option adds the wraparound ratios") {
  Spectrum s{{0.1, 1.0, 2.0, 4.0, 5.5}, specstat::SpectrumKind::circle};
  const auto open_seq = kth_spacing_ratios(s, 1);
  const auto cyclic_seq = kth_spacing_ratios(s, 1, RatioMode::sliding, true);
  REQUIRE(cyclic_seq.values.size() == open_seq.values.size() + 2);
  for (std::size_t i = 0; i < open_seq.values.size(); ++i)
    REQUIRE(cyclic_seq.values[i] == open_seq.values[i]);
}

// --- scaling law -----------------------------------------------------------

TEST_CASE("effective index formula") {
  REQUIRE(predicted_beta_prime(1, 1) == 1);
  REQUIRE(predicted_beta_prime(2, 1) == 2);
  REQUIRE(predicted_beta_prime(4, 1) == 4);
  REQUIRE(predicted_beta_prime(1, 2) == 4);
  REQUIRE(predicted_beta_prime(1, 3) == 8);
  REQUIRE(predicted_beta_prime(1, 4) == 13);
  REQUIRE(predicted_beta_prime(2, 2) == 7);
  REQUIRE(predicted_beta_prime(2, 3) == 14);
  REQUIRE(predicted_beta_prime(2, 4) == 23);
  REQUIRE(predicted_beta_prime(4, 2) == 13);
  REQUIRE(predicted_beta_prime(4, 3) == 26);
  REQUIRE(predicted_beta_prime(4, 4) == 43);
  REQUIRE(predicted_beta_prime(1, 9) == 53);
  REQUIRE(predicted_beta_prime(1, 20) == 229);
  REQUIRE_THROWS_AS(predicted_beta_prime(3, 2), specstat::ConfigError);
  REQUIRE_THROWS_AS(predicted_beta_prime(1, 0), specstat::ConfigError);
}

// --- surmise ----------------------------------------------------------------

TEST_CASE("normalization constant for beta' = 1 is 27/8") {
  const SurmiseParams p = surmise_params(1.0);
  REQUIRE(p.norm() == Catch::Approx(27.0 / 8.0).margin(1e-8));
}

TEST_CASE("pdf integrates to one across the beta' range") {
  for (double b : {1.0, 2.0, 7.0, 13.0, 26.0, 43.0, 60.0}) {
    const SurmiseParams p = surmise_params(b);
    const double total = specstat::integrate(
        [&p](double r) { return surmise_pdf(r, p); }, 0.0,
        std::numeric_limits<double>::infinity(), 1e-10);
    REQUIRE(total == Catch::Approx(1.0).margin(1e-8));
  }
}

TEST_CASE("pdf point values and reflection identity") {
  const SurmiseParams p1 = surmise_params(1.0);
  REQUIRE(surmise_pdf(0.0, p1) == 0.0);
  REQUIRE(surmise_pdf(1.0, p1) == Catch::Approx(0.4330127).margin(1e-5));

  for (double b : {1.0, 4.0, 13.0, 43.0}) {
    const SurmiseParams p = surmise_params(b);
    for (double r : {0.5, 2.0, 7.0}) {
      const double lhs = surmise_pdf(1.0 / r, p);
      const double rhs = r * r * surmise_pdf(r, p);
      REQUIRE(lhs == Catch::Approx(rhs).margin(1e-10));
    }
  }
}

TEST_CASE("cdf is one half at r = 1") {
  for (double b : {1.0, 4.0, 8.0, 13.0, 23.0, 43.0}) {
    const SurmiseParams p = surmise_params(b);
    REQUIRE(surmise_cdf(1.0, p) == Catch::Approx(0.5).margin(1e-8));
  }
}

TEST_CASE("numerical cdf derivative matches the pdf") {
  RngStream rng(23, 0);
  for (double b : {1.0, 4.0, 13.0, 43.0}) {
    const SurmiseParams p = surmise_params(b);
    for (int i = 0; i < 50; ++i) {
      const double r = rng.uniform(0.05, 3.0);
      const double h = 1e-5;
      const double d = (surmise_cdf(r + h, p) - surmise_cdf(r - h, p)) / (2 * h);
      REQUIRE(d == Catch::Approx(surmise_pdf(r, p)).margin(1e-6));
    }
  }
}

TEST_CASE("table evaluation agrees with direct quadrature") {
  RngStream rng(29, 0);
  for (double b : {1.0, 4.0, 13.0, 43.0, 60.0}) {
    const SurmiseParams p = surmise_params(b);
    const specstat::detail::SurmiseCdfTable table(p);
    for (int i = 0; i < 25; ++i) {
      const double r = rng.uniform(0.02, 5.0);
      REQUIRE(table(r) == Catch::Approx(surmise_cdf(r, p)).margin(1e-9));
    }
  }
}

TEST_CASE("surmise means reproduce the tabulated averages") {
  REQUIRE(surmise_mean(surmise_params(4)) == Catch::Approx(1.1747).margin(5e-5));
  REQUIRE(surmise_mean(surmise_params(8)) == Catch::Approx(1.0855).margin(5e-5));
  REQUIRE(surmise_mean(surmise_params(13)) == Catch::Approx(1.0521).margin(5e-5));
  REQUIRE(surmise_mean(surmise_params(43)) == Catch::Approx(1.0156).margin(5e-5));
}

TEST_CASE("invalid beta' is rejected") {
  REQUIRE_THROWS_AS(surmise_params(0.0), specstat::ConfigError);
  REQUIRE_THROWS_AS(surmise_params(-2.0), specstat::ConfigError);
}

// --- D statistic and KS test -------------------------------------------------

TEST_CASE("quantile samples bound the D statistic") {
  const std::size_t n = 1000;
  const testkit::SurmiseSampler sampler(4.0);
  std::vector<double> sample(n);
  for (std::size_t i = 0; i < n; ++i)
    sample[i] = sampler.quantile((static_cast<double>(i) + 0.5) / n);
  const double d = cdf_distance(sample, sampler.params());
  REQUIRE(d == Catch::Approx(1.0 / (2.0 * n)).margin(1e-6));
}

TEST_CASE("D argmin recovers the generating index") {
  RngStream rng(31, 0);
  const testkit::SurmiseSampler sampler(4.0);
  const std::vector<double> sample = sampler.sample(100000, rng);
  double best_d = std::numeric_limits<double>::infinity();
  int best_b = 0;
  for (int b = 1; b <= 60; ++b) {
    const double d = cdf_distance(sample, surmise_params(b));
    if (d < best_d) {
      best_d = d;
      best_b = b;
    }
  }
  REQUIRE(best_b == 4);
}

TEST_CASE("quantile samples bound the KS statistic") {
  const std::size_t n = 100;
  const testkit::SurmiseSampler sampler(8.0);
  std::vector<double> sample(n);
  for (std::size_t i = 0; i < n; ++i)
    sample[i] = sampler.quantile((static_cast<double>(i) + 0.5) / n);
  const auto [stat, p] = ks_test(sample, sampler.params());
  REQUIRE(stat <= 1.0 / (2.0 * n) + 1e-6);
  REQUIRE(p > 0.999);
}

TEST_CASE("Kolmogorov p-value spot check") {
  // n = 100, stat = 0.05 -> lambda = 0.5; series evaluated by hand:
  // 2(e^-0.5 - e^-2 + e^-4.5 - e^-8 + ...) = 0.963946...
  REQUIRE(specstat::detail::kolmogorov_p(0.5) == Catch::Approx(0.9639).margin(1e-4));
  REQUIRE(specstat::detail::kolmogorov_p(0.0) == 1.0);
  REQUIRE(specstat::detail::kolmogorov_p(10.0) == 0.0);
}

TEST_CASE("KS p-values are calibrated on matched synthetic data") {
  const testkit::SurmiseSampler sampler(7.0);
  int ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    RngStream rng(1000, static_cast<std::uint64_t>(trial));
    const std::vector<double> sample = sampler.sample(10000, rng);
    const auto [stat, p] = ks_test(sample, sampler.params());
    if (p > 0.01) ++ok;
  }
  REQUIRE(ok >= 99);
}

TEST_CASE("empty samples are rejected") {
  const SurmiseParams p = surmise_params(2.0);
  const std::vector<double> empty;
  REQUIRE_THROWS_AS(cdf_distance(empty, p), specstat::EmptySampleError);
  REQUIRE_THROWS_AS(ks_test(empty, p), specstat::EmptySampleError);
  REQUIRE_THROWS_AS(fit_beta_prime(empty, 1, 10, 1), specstat::EmptySampleError);
  REQUIRE_THROWS_AS(histogram(empty, 10, 0, 5), specstat::EmptySampleError);
}

// --- fitting -----------------------------------------------------------------

TEST_CASE("fit recovers beta' = 13 from synthetic samples") {
  RngStream rng(37, 0);
  const testkit::SurmiseSampler sampler(13.0);
  const std::vector<double> sample = sampler.sample(100000, rng);
  const auto report = fit_beta_prime(sample, 1.0, 60.0, 1.0);
  REQUIRE(report.beta_fit == 13.0);
  REQUIRE_FALSE(report.boundary_hit);
  REQUIRE(report.n == sample.size());
  REQUIRE(report.d_curve.size() == 60);
}

TEST_CASE("fit recovery across the tabulated beta' set") {
  int stream = 100;
  for (double b : {1.0, 2.0, 4.0, 7.0, 8.0, 13.0, 14.0, 23.0, 26.0, 43.0}) {
    RngStream rng(41, static_cast<std::uint64_t>(stream++));
    const testkit::SurmiseSampler sampler(b);
    const std::vector<double> sample = sampler.sample(100000, rng);
    const auto report = fit_beta_prime(sample, 1.0, 60.0, 1.0);
    REQUIRE(report.beta_fit == b);
  }
}

TEST_CASE("half-step grid resolves beta' within 0.5") {
  RngStream rng(43, 0);
  const testkit::SurmiseSampler sampler(4.0);
  const std::vector<double> sample = sampler.sample(50000, rng);
  const auto report = fit_beta_prime(sample, 1.0, 20.0, 0.5);
  REQUIRE(std::fabs(report.beta_fit - 4.0) <= 0.5);
}

TEST_CASE("median of synthetic samples approaches one") {
  for (double b : {1.0, 13.0}) {
    RngStream rng(47, static_cast<std::uint64_t>(b));
    const testkit::SurmiseSampler sampler(b);
    std::vector<double> sample = sampler.sample(100000, rng);
    std::nth_element(sample.begin(), sample.begin() + sample.size() / 2, sample.end());
    REQUIRE(sample[sample.size() / 2] == Catch::Approx(1.0).margin(0.05));
  }
}

TEST_CASE("Poisson spacings push the fit to the grid boundary") {
  RngStream rng(53, 0);
  std::vector<double> levels(20001);
  double x = 0;
  for (auto& v : levels) v = (x += -std::log(1.0 - rng.uniform()));
  const auto rs = kth_spacing_ratios(line(levels), 1);
  const auto report = fit_beta_prime(rs, 1.0, 60.0, 1.0);
  REQUIRE(report.beta_fit == 1.0);
  REQUIRE(report.boundary_hit);
}

TEST_CASE("fit argument validation") {
  const std::vector<double> sample{1.0, 2.0, 0.5};
  REQUIRE_THROWS_AS(fit_beta_prime(sample, 0.0, 10.0, 1.0), specstat::ConfigError);
  REQUIRE_THROWS_AS(fit_beta_prime(sample, 5.0, 2.0, 1.0), specstat::ConfigError);
  REQUIRE_THROWS_AS(fit_beta_prime(sample, 1.0, 10.0, 0.0), specstat::ConfigError);
}

// --- histogram ----------------------------------------------------------------

TEST_CASE("single bin holds all mass") {
  const std::vector<double> values(100, 2.5);
  const auto bins = histogram(values, 1, 0.0, 5.0);
  REQUIRE(bins.size() == 1);
  REQUIRE(bins[0].density == Catch::Approx(1.0 / 5.0).margin(1e-12));
}

TEST_CASE("uniform grid sample is flat") {
  std::vector<double> values;
  for (int i = 0; i < 5000; ++i) values.push_back(5.0 * i / 5000.0);
  const auto bins = histogram(values, 5, 0.0, 5.0);
  for (const auto& b : bins) REQUIRE(b.density == Catch::Approx(0.2).margin(1e-3));
}

TEST_CASE("out-of-range values count toward the total only") {
  std::vector<double> values{0.5, 1.5, 7.0, 9.0};  // half the sample in range
  const auto bins = histogram(values, 2, 0.0, 2.0);
  double integral = 0;
  for (const auto& b : bins) integral += b.density * 1.0;
  REQUIRE(integral == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("histogram of synthetic samples tracks the pdf") {
  RngStream rng(59, 0);
  const testkit::SurmiseSampler sampler(4.0);
  const std::vector<double> sample = sampler.sample(200000, rng);
  const auto bins = histogram(sample, 100, 0.0, 5.0);
  double max_dev = 0;
  for (const auto& b : bins)
    max_dev = std::max(max_dev,
                       std::fabs(b.density - surmise_pdf(b.center, sampler.params())));
  REQUIRE(max_dev < 0.02);
}
