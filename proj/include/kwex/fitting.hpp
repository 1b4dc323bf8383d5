#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kwex {

enum class FitFamily { Exponential, Gamma, PowerLawTail, LogNormal, PiecewiseBulkTail };
enum class BulkFamily { Gamma, LogNormal };
enum class DimensionFormula { FullD, HalfD };

std::string to_string(FitFamily family);
std::string to_string(BulkFamily family);

/// Thrown when a fit cannot be computed from the given samples (degenerate
/// data, too few tail points, non-positive values, ...).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Estimated parameters for one family. Fields not used by the family stay
/// NaN. The gamma bulk is parameterized as density ~ w^n exp(-w/T), i.e.
/// standard gamma shape n+1 and scale T.
struct FitResult {
  FitFamily family = FitFamily::Exponential;

  double T = 0.0;      // exponential / gamma scale
  double n = 0.0;      // gamma order (shape - 1)
  double alpha = 0.0;  // power-law CCDF exponent
  double w_min = 0.0;  // power-law threshold
  double mu = 0.0;     // log-normal location
  double sigma = 0.0;  // log-normal scale
  double w_c = 0.0;    // piecewise bulk/tail crossover

  double ks = 0.0;       // goodness of fit (piecewise: max of the segments)
  double ks_bulk = 0.0;  // piecewise only
  double ks_tail = 0.0;  // piecewise only
  BulkFamily bulk_family = BulkFamily::LogNormal;  // piecewise only
  double tail_mass = 0.0;  // piecewise only: fraction of samples above w_c

  std::size_t n_used = 0;
  std::vector<std::string> warnings;

  bool has_warning(const std::string& tag) const;
};

/// Survival function of the fitted model at w (1 - CDF).
double model_ccdf(const FitResult& fit, double w);

/// Maximum-likelihood exponential fit: T = sample mean.
FitResult fit_exponential(std::span<const double> samples);

struct GammaStart {
  double n;
  double T;
};

/// Moment inversion for the gamma family: T = variance/mean,
/// n = mean^2/variance - 1. Used as fit_gamma's starting point.
GammaStart gamma_moment_start(double mean, double variance);

/// Gamma fit of density ~ w^n exp(-w/T): moment inversion refined by profile
/// maximum likelihood.
FitResult fit_gamma(std::span<const double> samples);

/// Hill estimator of the CCDF tail exponent over samples above w_min. When
/// w_min is absent, scans a quantile grid and keeps the threshold with the
/// smallest tail KS distance.
FitResult fit_powerlaw_tail(std::span<const double> samples,
                            std::optional<double> w_min = std::nullopt);

/// Log-moment fit: mu = mean of logs, sigma = population std of logs.
FitResult fit_lognormal(std::span<const double> samples);

struct PiecewiseOptions {
  BulkFamily bulk = BulkFamily::LogNormal;
  double quantile_lo = 0.80;   // crossover candidate grid, in sample quantiles
  double quantile_hi = 0.999;
  int n_candidates = 100;
  std::size_t min_tail = 10;   // smallest admissible tail sample count
};

/// Bulk + power-law-tail fit of the crossover form: scans candidate w_c,
/// fits the bulk family below and a Pareto tail above, and keeps the w_c
/// minimizing the larger segment KS distance (smallest w_c wins ties). Falls
/// back to a bulk-only fit, with a warning, when no candidate has enough tail
/// samples or when the bulk family alone describes the tail at least as well.
FitResult fit_piecewise(std::span<const double> samples, PiecewiseOptions options = {});

struct EffectiveDimension {
  double D;
  double n;  // gamma order D/2
};

/// Effective gas dimension for saving propensity lambda. FullD is
/// (1+2L)/(1-2L); HalfD is the same expression halved. Singular at L = 1/2.
EffectiveDimension effective_dimension(double lambda, DimensionFormula formula);

}  // namespace kwex
