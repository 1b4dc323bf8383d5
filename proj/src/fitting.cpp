#include "kwex/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "kwex/stats.hpp"

namespace kwex {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> sorted_copy(std::span<const double> samples) {
  std::vector<double> out(samples.begin(), samples.end());
  std::sort(out.begin(), out.end());
  return out;
}

double exponential_cdf(double w, double T) {
  return w <= 0.0 ? 0.0 : 1.0 - std::exp(-w / T);
}

double gamma_cdf(double w, double order_n, double T) {
  return w <= 0.0 ? 0.0 : boost::math::gamma_p(order_n + 1.0, w / T);
}

double lognormal_cdf(double w, double mu, double sigma) {
  if (w <= 0.0) return 0.0;
  return 0.5 * std::erfc((mu - std::log(w)) / (sigma * std::numbers::sqrt2_v<double>));
}

double pareto_cdf(double w, double alpha, double w_min) {
  return w <= w_min ? 0.0 : 1.0 - std::pow(w_min / w, alpha);
}

double bulk_cdf(BulkFamily family, const FitResult& fit, double w) {
  return family == BulkFamily::Gamma ? gamma_cdf(w, fit.n, fit.T)
                                     : lognormal_cdf(w, fit.mu, fit.sigma);
}

/// Hill estimate over the strictly-above-threshold part of an ascending
/// sorted sample. Returns the tail begin iterator through `tail_begin`.
double hill_alpha(const std::vector<double>& sorted, double w_min, std::size_t* tail_count) {
  const auto begin = std::upper_bound(sorted.begin(), sorted.end(), w_min);
  const std::size_t k = static_cast<std::size_t>(sorted.end() - begin);
  *tail_count = k;
  if (k == 0) return kNaN;
  double log_sum = 0.0;
  for (auto it = begin; it != sorted.end(); ++it) log_sum += std::log(*it / w_min);
  if (log_sum <= 0.0) return kNaN;  // all tail samples at w_min
  return static_cast<double>(k) / log_sum;
}

FitResult blank(FitFamily family, std::size_t n_used) {
  FitResult fit;
  fit.family = family;
  fit.T = fit.n = fit.alpha = fit.w_min = fit.mu = fit.sigma = fit.w_c = kNaN;
  fit.ks = fit.ks_bulk = fit.ks_tail = fit.tail_mass = kNaN;
  fit.n_used = n_used;
  return fit;
}

}  // namespace

std::string to_string(FitFamily family) {
  switch (family) {
    case FitFamily::Exponential: return "exponential";
    case FitFamily::Gamma: return "gamma";
    case FitFamily::PowerLawTail: return "powerlaw_tail";
    case FitFamily::LogNormal: return "lognormal";
    case FitFamily::PiecewiseBulkTail: return "piecewise_bulk_tail";
  }
  return "unknown";
}

std::string to_string(BulkFamily family) {
  return family == BulkFamily::Gamma ? "gamma" : "lognormal";
}

bool FitResult::has_warning(const std::string& tag) const {
  return std::find(warnings.begin(), warnings.end(), tag) != warnings.end();
}

double model_ccdf(const FitResult& fit, double w) {
  switch (fit.family) {
    case FitFamily::Exponential:
      return 1.0 - exponential_cdf(w, fit.T);
    case FitFamily::Gamma:
      return 1.0 - gamma_cdf(w, fit.n, fit.T);
    case FitFamily::PowerLawTail:
      return 1.0 - pareto_cdf(w, fit.alpha, fit.w_min);
    case FitFamily::LogNormal:
      return 1.0 - lognormal_cdf(w, fit.mu, fit.sigma);
    case FitFamily::PiecewiseBulkTail: {
      if (w >= fit.w_c) return fit.tail_mass * std::pow(fit.w_c / w, fit.alpha);
      // Bulk segment renormalized to the mass below the crossover.
      const double f_c = bulk_cdf(fit.bulk_family, fit, fit.w_c);
      if (f_c <= 0.0) return 1.0;
      return 1.0 - (1.0 - fit.tail_mass) * bulk_cdf(fit.bulk_family, fit, w) / f_c;
    }
  }
  return kNaN;
}

FitResult fit_exponential(std::span<const double> samples) {
  if (samples.empty()) throw FitError("fit_exponential: samples must be non-empty");
  for (double x : samples) {
    if (!(x >= 0.0)) throw FitError("fit_exponential: samples must be non-negative");
  }
  const double mean = moments(samples).mean;
  if (mean <= 0.0) throw FitError("fit_exponential: sample mean must be positive");

  FitResult fit = blank(FitFamily::Exponential, samples.size());
  fit.T = mean;
  fit.ks = ks_distance(samples, [&](double w) { return exponential_cdf(w, fit.T); });
  return fit;
}

GammaStart gamma_moment_start(double mean, double variance) {
  return {mean * mean / variance - 1.0, variance / mean};
}

FitResult fit_gamma(std::span<const double> samples) {
  if (samples.empty()) throw FitError("fit_gamma: samples must be non-empty");
  double log_mean = 0.0;
  for (double x : samples) {
    if (!(x > 0.0)) throw FitError("fit_gamma: samples must be strictly positive");
    log_mean += std::log(x);
  }
  log_mean /= static_cast<double>(samples.size());

  const SummaryStats stats = moments(samples);
  if (stats.variance <= 0.0) throw FitError("fit_gamma: degenerate sample (zero variance)");

  // Profile likelihood in the shape k = n + 1 with scale T = mean / k:
  // the stationarity condition is log(k) - digamma(k) = s, with
  // s = log(mean) - mean(log). The left side decreases monotonically from
  // +inf to 0, so the root is unique and bracketable.
  const double s = std::log(stats.mean) - log_mean;
  const double k_moment = gamma_moment_start(stats.mean, stats.variance).n + 1.0;
  double k = k_moment;
  if (s > 0.0) {
    double lo = k_moment, hi = k_moment;
    auto residual = [s](double kk) { return std::log(kk) - boost::math::digamma(kk) - s; };
    while (residual(lo) < 0.0) lo *= 0.5;
    while (residual(hi) > 0.0) hi *= 2.0;
    for (int iter = 0; iter < 200; ++iter) {
      k = 0.5 * (lo + hi);
      const double r = residual(k);
      if (std::abs(r) <= 1e-8) break;
      (r > 0.0 ? lo : hi) = k;
    }
  }

  FitResult fit = blank(FitFamily::Gamma, samples.size());
  fit.n = k - 1.0;
  fit.T = stats.mean / k;
  fit.ks = ks_distance(samples, [&](double w) { return gamma_cdf(w, fit.n, fit.T); });
  return fit;
}

FitResult fit_powerlaw_tail(std::span<const double> samples, std::optional<double> w_min) {
  if (samples.empty()) throw FitError("fit_powerlaw_tail: samples must be non-empty");
  const std::vector<double> sorted = sorted_copy(samples);
  constexpr std::size_t kMinTail = 10;

  auto evaluate = [&](double threshold, std::size_t min_tail) -> std::optional<FitResult> {
    if (!(threshold > 0.0)) return std::nullopt;
    std::size_t k = 0;
    const double alpha = hill_alpha(sorted, threshold, &k);
    if (k < min_tail || !std::isfinite(alpha)) return std::nullopt;
    FitResult fit = blank(FitFamily::PowerLawTail, k);
    fit.alpha = alpha;
    fit.w_min = threshold;
    const std::span<const double> tail(sorted.data() + (sorted.size() - k), k);
    fit.ks = ks_distance(tail, [&](double w) { return pareto_cdf(w, alpha, threshold); });
    return fit;
  };

  if (w_min.has_value()) {
    // An explicit threshold is taken at face value: any non-empty tail is
    // estimable, whereas the scan below insists on kMinTail per candidate.
    auto fit = evaluate(*w_min, 1);
    if (!fit.has_value()) {
      throw FitError("fit_powerlaw_tail: needs at least 1 sample above w_min");
    }
    return *fit;
  }

  // Threshold scan over an upper-quantile grid; smallest KS wins, ties go to
  // the smallest threshold.
  std::optional<FitResult> best;
  constexpr int kCandidates = 100;
  constexpr double kQLo = 0.80, kQHi = 0.999;
  for (int i = 0; i < kCandidates; ++i) {
    const double q = kQLo + (kQHi - kQLo) * static_cast<double>(i) / (kCandidates - 1);
    auto fit = evaluate(quantile_sorted(sorted, q), kMinTail);
    if (!fit.has_value()) continue;
    if (!best.has_value() || fit->ks < best->ks ||
        (fit->ks == best->ks && fit->w_min < best->w_min)) {
      best = fit;
    }
  }
  if (!best.has_value()) {
    throw FitError("fit_powerlaw_tail: no scanned threshold keeps at least " +
                   std::to_string(kMinTail) + " tail samples");
  }
  return *best;
}

FitResult fit_lognormal(std::span<const double> samples) {
  if (samples.empty()) throw FitError("fit_lognormal: samples must be non-empty");
  double sum = 0.0, sum_sq = 0.0;
  for (double x : samples) {
    if (!(x > 0.0)) throw FitError("fit_lognormal: samples must be strictly positive");
    const double lx = std::log(x);
    sum += lx;
    sum_sq += lx * lx;
  }
  const double n = static_cast<double>(samples.size());
  const double mu = sum / n;
  const double var = std::max(0.0, sum_sq / n - mu * mu);

  FitResult fit = blank(FitFamily::LogNormal, samples.size());
  fit.mu = mu;
  fit.sigma = std::sqrt(var);
  if (fit.sigma == 0.0) {
    fit.warnings.push_back("degenerate");
    return fit;
  }
  fit.ks = ks_distance(samples, [&](double w) { return lognormal_cdf(w, fit.mu, fit.sigma); });
  return fit;
}

FitResult fit_piecewise(std::span<const double> samples, PiecewiseOptions options) {
  if (samples.size() < 100) throw FitError("fit_piecewise: needs at least 100 samples");
  const std::vector<double> sorted = sorted_copy(samples);

  auto fit_bulk = [&](std::span<const double> part) {
    return options.bulk == BulkFamily::Gamma ? fit_gamma(part) : fit_lognormal(part);
  };

  FitResult bulk_only = fit_bulk(samples);

  struct Candidate {
    FitResult bulk;
    FitResult tail;
    double w_c;
    double objective;
  };
  std::optional<Candidate> best;

  for (int i = 0; i < options.n_candidates; ++i) {
    const double q = options.quantile_lo +
                     (options.quantile_hi - options.quantile_lo) * static_cast<double>(i) /
                         (options.n_candidates - 1);
    const double w_c = quantile_sorted(sorted, q);

    const auto split = std::lower_bound(sorted.begin(), sorted.end(), w_c);
    const auto tail_begin = std::upper_bound(split, sorted.end(), w_c);
    const std::size_t n_bulk = static_cast<std::size_t>(split - sorted.begin());
    const std::size_t n_tail = static_cast<std::size_t>(sorted.end() - tail_begin);
    if (n_tail < options.min_tail || n_bulk < 10) continue;

    try {
      FitResult bulk = fit_bulk(std::span<const double>(sorted.data(), n_bulk));
      if (bulk.has_warning("degenerate")) continue;
      FitResult tail = fit_powerlaw_tail(
          std::span<const double>(sorted.data() + (sorted.size() - n_tail), n_tail), w_c);
      const double objective = std::max(bulk.ks, tail.ks);
      if (!best.has_value() || objective < best->objective ||
          (objective == best->objective && w_c < best->w_c)) {
        best = Candidate{std::move(bulk), std::move(tail), w_c, objective};
      }
    } catch (const FitError&) {
      continue;
    }
  }

  if (!best.has_value()) {
    bulk_only.warnings.push_back("tail-rejected");
    bulk_only.warnings.push_back("no-tail-candidates");
    return bulk_only;
  }

  // Accept the tail only where the power law beats the bulk family's own
  // account of the same region (the bulk-only fit conditioned above w_c).
  const auto tail_begin = std::upper_bound(sorted.begin(), sorted.end(), best->w_c);
  const std::size_t n_tail_best = static_cast<std::size_t>(sorted.end() - tail_begin);
  const std::span<const double> tail_samples(sorted.data() + (sorted.size() - n_tail_best),
                                             n_tail_best);
  const double f_c = 1.0 - model_ccdf(bulk_only, best->w_c);
  double bulk_tail_ks = 1.0;
  if (f_c < 1.0) {
    bulk_tail_ks = ks_distance(tail_samples, [&](double w) {
      const double f = 1.0 - model_ccdf(bulk_only, w);
      return (f - f_c) / (1.0 - f_c);
    });
  }
  if (best->tail.ks >= bulk_tail_ks) {
    bulk_only.warnings.push_back("tail-rejected");
    return bulk_only;
  }

  FitResult fit = blank(FitFamily::PiecewiseBulkTail, samples.size());
  fit.bulk_family = options.bulk;
  if (options.bulk == BulkFamily::Gamma) {
    fit.n = best->bulk.n;
    fit.T = best->bulk.T;
  } else {
    fit.mu = best->bulk.mu;
    fit.sigma = best->bulk.sigma;
  }
  fit.alpha = best->tail.alpha;
  fit.w_min = best->w_c;
  fit.w_c = best->w_c;
  fit.ks_bulk = best->bulk.ks;
  fit.ks_tail = best->tail.ks;
  fit.ks = best->objective;
  fit.tail_mass = static_cast<double>(tail_samples.size()) / static_cast<double>(sorted.size());
  return fit;
}

EffectiveDimension effective_dimension(double lambda, DimensionFormula formula) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("effective_dimension: lambda must lie in [0,1]");
  }
  if (lambda == 0.5) {
    throw std::invalid_argument("effective_dimension: lambda = 1/2 is singular");
  }
  double d = (1.0 + 2.0 * lambda) / (1.0 - 2.0 * lambda);
  if (formula == DimensionFormula::HalfD) d *= 0.5;
  return {d, d / 2.0};
}

}  // namespace kwex
