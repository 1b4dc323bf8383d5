#pragma once

#include <string>

namespace kwex {

enum class ModelVariant { NoSaving, UniformSaving, DistributedSaving, BiDirectional };

std::string to_string(ModelVariant variant);

/// Law for drawing per-agent saving propensities in the distributed-saving
/// model. Delta puts all agents at one value; Uniform draws from [lo, hi).
/// Propensities live in [0, 1): an agent at 1 would never release wealth.
struct LambdaLaw {
  enum class Kind { Delta, Uniform };

  Kind kind = Kind::Uniform;
  double lo = 0.0;
  double hi = 0.0;  // == lo for Delta

  static LambdaLaw delta(double lambda0);
  static LambdaLaw uniform(double lo, double hi);

  /// Throws std::invalid_argument unless 0 <= lo <= hi < 1.
  void validate() const;
};

/// Tagged selection of one exchange rule with its parameters.
struct ModelSpec {
  ModelVariant variant = ModelVariant::NoSaving;
  double lambda = 0.0;     // UniformSaving only
  LambdaLaw lambda_law{};  // DistributedSaving only

  static ModelSpec no_saving();
  static ModelSpec uniform_saving(double lambda);
  static ModelSpec distributed_saving(LambdaLaw law);
  static ModelSpec bidirectional();

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;

  bool has_per_agent_lambdas() const { return variant == ModelVariant::DistributedSaving; }
};

/// Post-exchange wealth of the two agents. The sum is conserved to rounding
/// and both values are non-negative for admissible inputs.
struct ExchangeOutcome {
  double wi_new;
  double wj_new;
};

/// Pooled random split: both agents throw their full wealth into the pot and
/// the first receives the fraction r of it.
ExchangeOutcome exchange_no_saving(double wi, double wj, double r);

/// Both agents keep the fraction lambda of their wealth; the released
/// remainder is split randomly by r.
ExchangeOutcome exchange_uniform_saving(double wi, double wj, double lambda, double r);

/// Heterogeneous saving: agent i keeps li*wi, agent j keeps lj*wj, and the
/// combined released pool is split by r. Reduces to the uniform rule when
/// li == lj and to the no-saving rule when both are zero, bit-exactly.
ExchangeOutcome exchange_distributed_saving(double wi, double wj, double li, double lj,
                                            double r);

/// Two independent random fractions: agent i ends with r*wi + q*wj, agent j
/// with the complements.
ExchangeOutcome exchange_bidirectional(double wi, double wj, double r, double q);

}  // namespace kwex
