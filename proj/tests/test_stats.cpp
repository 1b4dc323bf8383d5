#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "kwex/stats.hpp"
#include "oracles.hpp"

using namespace kwex;

TEST_CASE("histogram bins are half-open on the left edge") {
  const std::vector<double> a{0.5, 1.5};
  Histogram h = build_histogram(a, BinScheme::linear(2, 0.0, 2.0));
  CHECK(h.counts == std::vector<std::uint64_t>{1, 1});

  const std::vector<double> b{1.0};
  h = build_histogram(b, BinScheme::linear(2, 0.0, 2.0));
  CHECK(h.counts == std::vector<std::uint64_t>{0, 1});

  CHECK_THROWS_AS(build_histogram(std::vector<double>{}, BinScheme::linear(2, 0.0, 2.0)),
                  std::invalid_argument);
}

TEST_CASE("histogram tracks out-of-range mass explicitly") {
  const std::vector<double> samples{-1.0, 0.5, 1.5, 7.0, 2.0};
  const Histogram h = build_histogram(samples, BinScheme::linear(2, 0.0, 2.0));
  CHECK(h.underflow == 1);
  CHECK(h.overflow == 2);  // 2.0 sits on the right edge, outside the last bin
  CHECK(h.counts[0] + h.counts[1] + h.underflow + h.overflow == h.n_total);
  CHECK(h.n_total == samples.size());
}

TEST_CASE("log bins route zeros to underflow") {
  const std::vector<double> samples{0.0, 0.1, 1.0, 10.0, 100.0};
  const Histogram h = build_histogram(samples, BinScheme::log_auto(samples, 4));
  CHECK(h.underflow == 1);
  std::uint64_t binned = 0;
  for (auto c : h.counts) binned += c;
  CHECK(binned == 4);
}

TEST_CASE("histogram masses match exponential bin integrals") {
  const double T = 1.0;
  const auto samples = oracle::exponential_samples(100000, T, 0xBADA55u);
  const Histogram h = build_histogram(samples, BinScheme::linear(50, 0.0, 10.0));
  const double n = static_cast<double>(h.n_total);
  for (std::size_t k = 0; k < h.n_bins(); ++k) {
    const double p =
        std::exp(-h.edges[k] / T) - std::exp(-h.edges[k + 1] / T);  // analytic bin mass
    const double se = std::sqrt(n * p * (1.0 - p));
    CHECK(std::abs(static_cast<double>(h.counts[k]) - n * p) <= 3.0 * se + 1.0);
  }
}

TEST_CASE("ccdf uses the inclusive counting convention") {
  CcdfCurve curve = empirical_ccdf(std::vector<double>{1.0, 2.0, 3.0});
  REQUIRE(curve.points.size() == 3);
  CHECK(curve.points[0].w == 1.0);
  CHECK(curve.points[0].fraction == 1.0);
  CHECK(curve.points[1].fraction == doctest::Approx(2.0 / 3.0));
  CHECK(curve.points[2].fraction == doctest::Approx(1.0 / 3.0));

  curve = empirical_ccdf(std::vector<double>{5.0, 5.0, 5.0});
  REQUIRE(curve.points.size() == 1);
  CHECK(curve.points[0].w == 5.0);
  CHECK(curve.points[0].fraction == 1.0);
}

TEST_CASE("ccdf log-log slope recovers a power-law exponent") {
  const auto samples = oracle::pareto_samples(100000, 2.0, 1.0, 0x7A3E17u);
  const CcdfCurve curve = empirical_ccdf(samples);
  std::vector<double> sorted(samples);
  std::sort(sorted.begin(), sorted.end());
  const double w_hi = quantile_sorted(sorted, 0.999);
  const double slope = ccdf_loglog_slope(curve, w_hi / 10.0, w_hi);
  CHECK(slope == doctest::Approx(-2.0).epsilon(0.05));  // +-0.1 on the top decade
}

TEST_CASE("ccdf at bin edges agrees with cumulative histogram mass") {
  const auto samples = oracle::exponential_samples(20000, 1.0, 0xC0FFEEu);
  const Histogram h = build_histogram(samples, BinScheme::linear(20, 0.0, 8.0));
  const CcdfCurve curve = empirical_ccdf(samples);
  const double n = static_cast<double>(h.n_total);

  auto ccdf_at = [&](double w) {
    // fraction of samples >= w from the curve (inclusive convention)
    double f = 0.0;
    for (const auto& p : curve.points) {
      if (p.w >= w) {
        f = p.fraction;
        break;
      }
    }
    return f;
  };

  double below = static_cast<double>(h.underflow);
  for (std::size_t k = 0; k < h.n_bins(); ++k) {
    CHECK(std::abs(ccdf_at(h.edges[k]) - (1.0 - below / n)) <= 1.0 / n + 1e-12);
    below += static_cast<double>(h.counts[k]);
  }
}

TEST_CASE("raw moments and variance") {
  SummaryStats s = moments(std::vector<double>{2.0, 2.0, 2.0});
  CHECK(s.m1 == 2.0);
  CHECK(s.m2 == 4.0);
  CHECK(s.variance == 0.0);

  s = moments(std::vector<double>{0.0, 2.0});
  CHECK(s.m1 == 1.0);
  CHECK(s.m2 == 2.0);
  CHECK(s.variance == 1.0);

  const auto gamma = oracle::gamma_samples(1000000, 1.0, 1.0, 0x6A77A5u);  // mean 2
  CHECK(moments(gamma).m1 == doctest::Approx(2.0).epsilon(0.0025));
}

TEST_CASE("gini spans equality to one-holder concentration") {
  CHECK(gini(std::vector<double>{1.0, 1.0, 1.0, 1.0}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(gini(std::vector<double>{0.0, 0.0, 0.0, 4.0}) == doctest::Approx(0.75));
  CHECK(gini(std::vector<double>{1.0, 2.0, 3.0}) == doctest::Approx(2.0 / 9.0));
  CHECK_THROWS_AS(gini(std::vector<double>{0.0, 0.0}), std::invalid_argument);

  // Scale invariance.
  const auto samples = oracle::exponential_samples(5000, 1.0, 0x91919u);
  std::vector<double> scaled(samples);
  for (double& x : scaled) x *= 123.0;
  CHECK(gini(scaled) == doctest::Approx(gini(samples)).epsilon(1e-12));
}

TEST_CASE("normalize_by_mean yields unit mean and is idempotent") {
  const std::vector<double> a = normalize_by_mean(std::vector<double>{2.0, 4.0});
  CHECK(a[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(a[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));

  CHECK(normalize_by_mean(std::vector<double>{1.0}) == std::vector<double>{1.0});

  const auto samples = oracle::lognormal_samples(10000, 0.3, 0.8, 0x5EEDu);
  const auto normalized = normalize_by_mean(samples);
  CHECK(moments(normalized).m1 == doctest::Approx(1.0).epsilon(1e-12));
  const auto twice = normalize_by_mean(normalized);
  CHECK(moments(twice).m1 == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(normalize_by_mean(std::vector<double>{0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("ks distance evaluates both one-sided gaps") {
  const std::vector<double> exact{0.25, 0.5, 0.75};
  CHECK(ks_distance(exact, [](double w) { return w; }) == doctest::Approx(0.25));

  const std::vector<double> one{1.0};
  CHECK(ks_distance(one, [](double) { return 0.4; }) == doctest::Approx(0.6));

  const auto samples = oracle::exponential_samples(100000, 1.0, 0xFEEDu);
  const double d = ks_distance(samples, [](double w) { return 1.0 - std::exp(-w); });
  CHECK(d < 0.006);  // 99th percentile of the null distance at this n is ~0.0052
}

TEST_CASE("histogram ks compares mass fractions and demands equal edges") {
  const std::vector<double> a{0.5, 1.5};
  const std::vector<double> b{0.5, 0.5, 0.5, 1.5};
  const BinScheme scheme = BinScheme::linear(2, 0.0, 2.0);
  const Histogram ha = build_histogram(a, scheme);
  const Histogram hb = build_histogram(b, scheme);
  CHECK(histogram_ks(ha, ha) == 0.0);
  CHECK(histogram_ks(ha, hb) == doctest::Approx(0.25));

  const Histogram hc = build_histogram(a, BinScheme::linear(4, 0.0, 2.0));
  CHECK_THROWS_AS(histogram_ks(ha, hc), std::invalid_argument);
}

TEST_CASE("sorted quantiles interpolate linearly") {
  const std::vector<double> sorted{1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(quantile_sorted(sorted, 0.0) == 1.0);
  CHECK(quantile_sorted(sorted, 1.0) == 5.0);
  CHECK(quantile_sorted(sorted, 0.5) == 3.0);
  CHECK(quantile_sorted(sorted, 0.25) == 2.0);
  CHECK(quantile_sorted(sorted, 0.1) == doctest::Approx(1.4));
}

TEST_CASE("mode bin center picks the most populated bin") {
  const std::vector<double> samples{0.1, 1.1, 1.2, 1.3, 2.5};
  const Histogram h = build_histogram(samples, BinScheme::linear(3, 0.0, 3.0));
  CHECK(h.mode_bin_center() == doctest::Approx(1.5));
  CHECK(summarize(samples, h).mode_bin_center == doctest::Approx(1.5));
}
