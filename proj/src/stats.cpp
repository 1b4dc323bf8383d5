#include "kwex/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace kwex {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

BinScheme BinScheme::linear(int n_bins, double lo, double hi) {
  require(n_bins >= 1, "n_bins must be >= 1");
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "need finite lo < hi");
  return BinScheme{Kind::Linear, n_bins, lo, hi};
}

BinScheme BinScheme::logarithmic(int n_bins, double min_positive, double hi) {
  require(n_bins >= 1, "n_bins must be >= 1");
  require(min_positive > 0.0 && std::isfinite(hi) && min_positive < hi,
          "need 0 < min_positive < hi");
  return BinScheme{Kind::Logarithmic, n_bins, min_positive, hi};
}

BinScheme BinScheme::linear_auto(std::span<const double> samples, int n_bins) {
  require(!samples.empty(), "samples must be non-empty");
  const double max = *std::max_element(samples.begin(), samples.end());
  const double hi = max > 0.0 ? std::nextafter(max, std::numeric_limits<double>::infinity())
                              : 1.0;
  return linear(n_bins, 0.0, hi);
}

BinScheme BinScheme::log_auto(std::span<const double> samples, int n_bins) {
  require(!samples.empty(), "samples must be non-empty");
  double min_pos = std::numeric_limits<double>::infinity();
  double max = 0.0;
  for (double x : samples) {
    if (x > 0.0 && x < min_pos) min_pos = x;
    if (x > max) max = x;
  }
  require(std::isfinite(min_pos) && max > min_pos, "need at least two distinct positive samples");
  return logarithmic(n_bins, min_pos, std::nextafter(max, std::numeric_limits<double>::infinity()));
}

std::vector<double> BinScheme::make_edges() const {
  std::vector<double> edges(static_cast<std::size_t>(n_bins) + 1);
  if (kind == Kind::Linear) {
    for (int k = 0; k <= n_bins; ++k) {
      edges[static_cast<std::size_t>(k)] = lo + (hi - lo) * static_cast<double>(k) / n_bins;
    }
  } else {
    const double log_lo = std::log(lo);
    const double log_hi = std::log(hi);
    for (int k = 0; k <= n_bins; ++k) {
      edges[static_cast<std::size_t>(k)] =
          std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(k) / n_bins);
    }
    edges.front() = lo;
    edges.back() = hi;
  }
  return edges;
}

double Histogram::density(std::size_t k) const {
  if (n_total == 0) return 0.0;
  return static_cast<double>(counts[k]) / (static_cast<double>(n_total) * bin_width(k));
}

double Histogram::mode_bin_center() const {
  const auto it = std::max_element(counts.begin(), counts.end());
  return bin_center(static_cast<std::size_t>(it - counts.begin()));
}

Histogram build_histogram(std::span<const double> samples, const BinScheme& scheme) {
  require(!samples.empty(), "samples must be non-empty");
  Histogram hist;
  hist.scheme = scheme;
  hist.edges = scheme.make_edges();
  hist.counts.assign(static_cast<std::size_t>(scheme.n_bins), 0);
  hist.n_total = samples.size();

  const double lo = hist.edges.front();
  const double hi = hist.edges.back();
  for (double x : samples) {
    if (x < lo) {
      ++hist.underflow;
    } else if (x >= hi) {
      ++hist.overflow;
    } else {
      // Binary search over edges keeps the half-open convention exact even
      // when computed bin indices would round across an edge.
      const auto it = std::upper_bound(hist.edges.begin(), hist.edges.end(), x);
      ++hist.counts[static_cast<std::size_t>(it - hist.edges.begin()) - 1];
    }
  }
  return hist;
}

double histogram_ks(const Histogram& a, const Histogram& b) {
  require(a.edges == b.edges, "histograms must share identical bin edges");
  require(a.n_total > 0 && b.n_total > 0, "histograms must be non-empty");
  const double na = static_cast<double>(a.n_total);
  const double nb = static_cast<double>(b.n_total);
  double cum_a = static_cast<double>(a.underflow);
  double cum_b = static_cast<double>(b.underflow);
  double dist = std::abs(cum_a / na - cum_b / nb);
  for (std::size_t k = 0; k < a.counts.size(); ++k) {
    cum_a += static_cast<double>(a.counts[k]);
    cum_b += static_cast<double>(b.counts[k]);
    dist = std::max(dist, std::abs(cum_a / na - cum_b / nb));
  }
  return dist;
}

CcdfCurve empirical_ccdf(std::span<const double> samples) {
  require(!samples.empty(), "samples must be non-empty");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  CcdfCurve curve;
  for (std::size_t i = 0; i < sorted.size();) {
    const double w = sorted[i];
    // fraction of samples >= w; i is the rank of the first occurrence
    curve.points.push_back({w, (n - static_cast<double>(i)) / n});
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == w) ++j;
    i = j;
  }
  return curve;
}

double ccdf_loglog_slope(const CcdfCurve& curve, double w_lo, double w_hi) {
  require(w_lo > 0.0 && w_lo < w_hi, "need 0 < w_lo < w_hi");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const auto& p : curve.points) {
    if (p.w < w_lo || p.w > w_hi || p.fraction <= 0.0) continue;
    const double x = std::log(p.w);
    const double y = std::log(p.fraction);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  require(n >= 2, "need at least two CCDF points in [w_lo, w_hi]");
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

SummaryStats moments(std::span<const double> samples) {
  require(!samples.empty(), "samples must be non-empty");
  SummaryStats s;
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  for (double x : samples) {
    const double x2 = x * x;
    m1 += x;
    m2 += x2;
    m3 += x2 * x;
    m4 += x2 * x2;
  }
  const double n = static_cast<double>(samples.size());
  s.m1 = m1 / n;
  s.m2 = m2 / n;
  s.m3 = m3 / n;
  s.m4 = m4 / n;
  s.mean = s.m1;
  s.variance = std::max(0.0, s.m2 - s.m1 * s.m1);
  return s;
}

SummaryStats summarize(std::span<const double> samples, const Histogram& hist) {
  SummaryStats s = moments(samples);
  s.mode_bin_center = hist.mode_bin_center();
  s.gini = gini(samples);
  return s;
}

double gini(std::span<const double> samples) {
  require(!samples.empty(), "samples must be non-empty");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  require(sorted.front() >= 0.0, "samples must be non-negative");

  double total = 0.0;
  double weighted = 0.0;  // sum of rank * value, ranks 1..n
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    total += sorted[i];
    weighted += static_cast<double>(i + 1) * sorted[i];
  }
  require(total > 0.0, "gini undefined for all-zero samples");
  const double n = static_cast<double>(sorted.size());
  return 2.0 * weighted / (n * total) - (n + 1.0) / n;
}

std::vector<double> normalize_by_mean(std::span<const double> samples) {
  require(!samples.empty(), "samples must be non-empty");
  const double mean = moments(samples).mean;
  require(mean > 0.0, "normalize_by_mean requires a positive mean");
  std::vector<double> out(samples.begin(), samples.end());
  for (double& x : out) x /= mean;
  return out;
}

double ks_distance(std::span<const double> samples,
                   const std::function<double(double)>& model_cdf) {
  require(!samples.empty(), "samples must be non-empty");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = model_cdf(sorted[i]);
    const double below = static_cast<double>(i) / n;
    const double above = static_cast<double>(i + 1) / n;
    dist = std::max({dist, f - below, above - f});
  }
  return dist;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  require(!sorted.empty(), "samples must be non-empty");
  require(q >= 0.0 && q <= 1.0, "quantile level must lie in [0,1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t k = static_cast<std::size_t>(pos);
  if (k + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(k);
  return sorted[k] + frac * (sorted[k + 1] - sorted[k]);
}

}  // namespace kwex
