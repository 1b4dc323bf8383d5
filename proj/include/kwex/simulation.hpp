#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kwex/exchange.hpp"
#include "kwex/rng.hpp"
#include "kwex/stats.hpp"

namespace kwex {

/// Wealth state of the N agents, plus per-agent saving propensities for the
/// distributed-saving model. `total` caches the conserved sum fixed at
/// initialization; exchanges preserve it to rounding.
struct AgentPopulation {
  std::vector<double> wealth;
  std::vector<double> lambdas;  // empty unless the model is DistributedSaving
  double total = 0.0;
  std::uint64_t exchanges = 0;  // pairwise exchanges applied so far

  std::size_t size() const { return wealth.size(); }
  double mean_wealth() const { return total / static_cast<double>(wealth.size()); }
  double sum_wealth() const;
  /// |sum(wealth) - total| / total.
  double conservation_drift() const;
};

enum class InitScheme { UniformEqual, RandomUniform };

/// Steady-state criterion: the run is equilibrated once `consecutive_passes`
/// successive checkpoints (every `checkpoint_interval` MC steps) keep the
/// histogram KS distance at or below `ks_tolerance`.
struct EquilibrationPolicy {
  std::uint64_t checkpoint_interval = 100;  // MC steps between checkpoints
  double ks_tolerance = 0.01;
  int consecutive_passes = 3;
  std::uint64_t max_steps = 20000;  // hard cap, MC steps

  void validate() const;
};

struct SimulationConfig {
  std::size_t n_agents = 1000;
  double total_wealth = 1000.0;
  InitScheme init = InitScheme::UniformEqual;
  EquilibrationPolicy equilibration{};
  std::uint64_t sample_steps = 20;   // MC steps pooled after equilibration
  std::uint64_t realizations = 100;  // ensemble size
  std::uint64_t master_seed = 0;

  void validate() const;
};

/// Builds the initial population. RandomUniform draws each wealth uniformly
/// then rescales so the sum equals total_wealth; per-agent lambdas are drawn
/// from the model's law (wealth first, then lambdas, one draw per agent).
AgentPopulation init_population(const SimulationConfig& config, const ModelSpec& model,
                                RandomStream& rng);

/// Applies `count` single exchanges in place. Each exchange picks an ordered
/// pair of distinct agents uniformly, draws the rule's random fraction(s),
/// and applies the model's kernel.
void sweep_exchanges(AgentPopulation& pop, const ModelSpec& model, RandomStream& rng,
                     std::uint64_t count);

/// One Monte Carlo step: N pairwise exchanges.
void mc_step(AgentPopulation& pop, const ModelSpec& model, RandomStream& rng);

/// Streak counter over checkpoint histograms. update() feeds the next
/// checkpoint and reports whether the policy's pass streak is complete.
/// A distance exactly at the tolerance counts as a pass.
class EquilibriumDetector {
 public:
  explicit EquilibriumDetector(EquilibrationPolicy policy);

  bool update(const Histogram& checkpoint);
  int passes() const { return passes_; }

 private:
  EquilibrationPolicy policy_;
  std::optional<Histogram> prev_;
  int passes_ = 0;
};

struct RealizationSummary {
  std::uint64_t index = 0;
  std::uint64_t equilibration_steps = 0;  // MC steps run before sampling
  bool converged = true;
  double mean = 0.0;
  double variance = 0.0;
  double max_drift = 0.0;  // worst conservation drift seen at checkpoints
};

struct RealizationResult {
  std::vector<double> samples;  // N * sample_steps pooled wealth values
  RealizationSummary summary;
};

/// Runs the population to equilibrium under the policy, then pools the full
/// population after each of `sample_steps` further MC steps. Checkpoint
/// histograms use 128 linear bins on [0, 8 * mean] and pool the population
/// over every MC step of the checkpoint interval, so the detector compares
/// distributional drift rather than single-snapshot noise. Hitting max_steps
/// without the detector firing flags the result as non-converged; sampling
/// still happens.
RealizationResult equilibrate_and_sample(AgentPopulation& pop, const ModelSpec& model,
                                         const EquilibrationPolicy& policy,
                                         std::uint64_t sample_steps, RandomStream& rng);

/// One full realization: init_population with the stream for
/// (config.master_seed, realization_index), then equilibrate_and_sample.
RealizationResult run_realization(const SimulationConfig& config, const ModelSpec& model,
                                  std::uint64_t realization_index);

struct EnsembleResult {
  std::vector<double> samples;  // realization-index order
  std::vector<RealizationSummary> realizations;
  bool all_converged = true;
};

/// Runs config.realizations independent realizations (seeded from
/// (master_seed, index)) and merges results in index order, so the aggregate
/// is identical for any thread count. threads == 0 picks the hardware count.
EnsembleResult ensemble_run(const SimulationConfig& config, const ModelSpec& model,
                            unsigned threads = 0);

}  // namespace kwex
