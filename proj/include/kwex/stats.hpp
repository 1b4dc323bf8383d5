#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace kwex {

/// Binning policy for build_histogram. Linear bins partition [lo, hi);
/// logarithmic bins partition [min_positive, hi) with log-spaced edges.
struct BinScheme {
  enum class Kind { Linear, Logarithmic };

  Kind kind = Kind::Linear;
  int n_bins = 50;
  double lo = 0.0;  // Linear: left edge; Logarithmic: min_positive floor
  double hi = 1.0;

  static BinScheme linear(int n_bins, double lo, double hi);
  static BinScheme logarithmic(int n_bins, double min_positive, double hi);

  /// Linear over [0, just past max(samples)] so every sample lands in a bin.
  static BinScheme linear_auto(std::span<const double> samples, int n_bins);
  /// Logarithmic over [smallest positive sample, just past max]; zeros are
  /// counted as underflow by the builder.
  static BinScheme log_auto(std::span<const double> samples, int n_bins);

  std::vector<double> make_edges() const;
};

/// Binned sample counts with half-open bins [edge_k, edge_{k+1}). Samples
/// outside [edges.front(), edges.back()) are tracked as under/overflow, so
/// counts + underflow + overflow == n_total always.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;
  std::uint64_t n_total = 0;
  BinScheme scheme{};

  std::size_t n_bins() const { return counts.size(); }
  double bin_width(std::size_t k) const { return edges[k + 1] - edges[k]; }
  double bin_center(std::size_t k) const { return 0.5 * (edges[k] + edges[k + 1]); }
  /// Normalized density in bin k: count / (n_total * width).
  double density(std::size_t k) const;
  /// Center of the most populated bin (smallest index wins ties).
  double mode_bin_center() const;
};

Histogram build_histogram(std::span<const double> samples, const BinScheme& scheme);

/// Max absolute difference of the cumulative bin-mass fractions of two
/// histograms built on identical edges. Throws std::invalid_argument when the
/// edges differ.
double histogram_ks(const Histogram& a, const Histogram& b);

/// Empirical complementary CDF with the inclusive convention:
/// fraction(w) = #(samples >= w) / n. One point per distinct sample value.
struct CcdfCurve {
  struct Point {
    double w;
    double fraction;
  };
  std::vector<Point> points;
};

CcdfCurve empirical_ccdf(std::span<const double> samples);

/// Least-squares slope of log(fraction) vs log(w) over curve points with
/// w_lo <= w <= w_hi. Requires at least two points in range.
double ccdf_loglog_slope(const CcdfCurve& curve, double w_lo, double w_hi);

struct SummaryStats {
  double mean = 0.0;
  double variance = 0.0;  // population variance
  double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
  double mode_bin_center = 0.0;
  double gini = 0.0;
};

/// Raw moments m1..m4 plus mean and population variance.
SummaryStats moments(std::span<const double> samples);

/// Moments, Gini, and the mode-bin center of the supplied histogram.
SummaryStats summarize(std::span<const double> samples, const Histogram& hist);

/// Gini coefficient via the sorted-index formula. Requires non-negative
/// samples with a positive sum.
double gini(std::span<const double> samples);

/// Returns samples divided by their mean (which must be positive).
std::vector<double> normalize_by_mean(std::span<const double> samples);

/// Sup-norm distance between the empirical CDF and model_cdf, evaluating both
/// one-sided gaps at every sample point.
double ks_distance(std::span<const double> samples,
                   const std::function<double(double)>& model_cdf);

/// Linear-interpolation quantile (q in [0,1]) of an ascending-sorted range.
double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace kwex
