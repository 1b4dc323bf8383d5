#include "kwex/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace kwex {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

BinScheme checkpoint_bins(const AgentPopulation& pop) {
  // Fixed edges across checkpoints; the conserved mean pins the scale and the
  // overflow counter absorbs any heavy tail beyond 8x the mean.
  return BinScheme::linear(128, 0.0, 8.0 * pop.mean_wealth());
}

}  // namespace

double AgentPopulation::sum_wealth() const {
  double sum = 0.0;
  for (double w : wealth) sum += w;
  return sum;
}

double AgentPopulation::conservation_drift() const {
  return std::abs(sum_wealth() - total) / total;
}

void EquilibrationPolicy::validate() const {
  require(checkpoint_interval >= 1, "equilibration.checkpoint_interval must be >= 1");
  require(ks_tolerance > 0.0 && ks_tolerance < 1.0, "equilibration.ks_tolerance must lie in (0,1)");
  require(consecutive_passes >= 1, "equilibration.consecutive_passes must be >= 1");
  require(max_steps >= checkpoint_interval,
          "equilibration.max_steps must be >= checkpoint_interval");
}

void SimulationConfig::validate() const {
  require(n_agents >= 2, "n_agents must be >= 2");
  require(std::isfinite(total_wealth) && total_wealth > 0.0, "total_wealth must be positive");
  require(sample_steps >= 1, "sample_steps must be >= 1");
  require(realizations >= 1, "realizations must be >= 1");
  equilibration.validate();
}

AgentPopulation init_population(const SimulationConfig& config, const ModelSpec& model,
                                RandomStream& rng) {
  config.validate();
  model.validate();

  AgentPopulation pop;
  pop.wealth.resize(config.n_agents);
  if (config.init == InitScheme::UniformEqual) {
    const double share = config.total_wealth / static_cast<double>(config.n_agents);
    std::fill(pop.wealth.begin(), pop.wealth.end(), share);
  } else {
    double sum = 0.0;
    for (double& w : pop.wealth) {
      w = rng.next_unit();
      sum += w;
    }
    // Degenerate all-zero draws are astronomically unlikely; fall back to the
    // equal split rather than divide by zero.
    if (sum <= 0.0) {
      std::fill(pop.wealth.begin(), pop.wealth.end(), 1.0);
      sum = static_cast<double>(config.n_agents);
    }
    const double scale = config.total_wealth / sum;
    for (double& w : pop.wealth) w *= scale;
  }
  pop.total = config.total_wealth;

  if (model.has_per_agent_lambdas()) {
    pop.lambdas.resize(config.n_agents);
    const LambdaLaw& law = model.lambda_law;
    for (double& l : pop.lambdas) {
      l = law.kind == LambdaLaw::Kind::Delta ? law.lo
                                             : law.lo + (law.hi - law.lo) * rng.next_unit();
    }
  }
  return pop;
}

void sweep_exchanges(AgentPopulation& pop, const ModelSpec& model, RandomStream& rng,
                     std::uint64_t count) {
  const std::size_t n = pop.size();
  require(n >= 2, "population needs at least two agents");

  for (std::uint64_t step = 0; step < count; ++step) {
    const std::size_t i = static_cast<std::size_t>(rng.next_index(n));
    std::size_t j = static_cast<std::size_t>(rng.next_index(n - 1));
    if (j >= i) ++j;

    const double wi = pop.wealth[i];
    const double wj = pop.wealth[j];
    ExchangeOutcome out{};
    switch (model.variant) {
      case ModelVariant::NoSaving:
        out = exchange_no_saving(wi, wj, rng.next_unit());
        break;
      case ModelVariant::UniformSaving:
        out = exchange_uniform_saving(wi, wj, model.lambda, rng.next_unit());
        break;
      case ModelVariant::DistributedSaving:
        out = exchange_distributed_saving(wi, wj, pop.lambdas[i], pop.lambdas[j],
                                          rng.next_unit());
        break;
      case ModelVariant::BiDirectional: {
        const double r = rng.next_unit();
        const double q = rng.next_unit();
        out = exchange_bidirectional(wi, wj, r, q);
        break;
      }
    }
    pop.wealth[i] = out.wi_new;
    pop.wealth[j] = out.wj_new;
    ++pop.exchanges;
  }
}

void mc_step(AgentPopulation& pop, const ModelSpec& model, RandomStream& rng) {
  sweep_exchanges(pop, model, rng, pop.size());
}

EquilibriumDetector::EquilibriumDetector(EquilibrationPolicy policy) : policy_(policy) {
  policy_.validate();
}

bool EquilibriumDetector::update(const Histogram& checkpoint) {
  if (prev_.has_value()) {
    const double dist = histogram_ks(*prev_, checkpoint);
    passes_ = dist <= policy_.ks_tolerance ? passes_ + 1 : 0;
  }
  prev_ = checkpoint;
  return passes_ >= policy_.consecutive_passes;
}

RealizationResult equilibrate_and_sample(AgentPopulation& pop, const ModelSpec& model,
                                         const EquilibrationPolicy& policy,
                                         std::uint64_t sample_steps, RandomStream& rng) {
  policy.validate();
  require(sample_steps >= 1, "sample_steps must be >= 1");

  const BinScheme bins = checkpoint_bins(pop);
  EquilibriumDetector detector(policy);

  RealizationResult result;
  result.summary.max_drift = pop.conservation_drift();

  // Each checkpoint histogram pools the full population after every MC step
  // of its interval. A single-snapshot histogram would put the KS noise floor
  // (~1/sqrt(N)) far above sensible tolerances; pooling N*interval values
  // makes the comparison measure distributional drift instead.
  std::vector<double> window;
  window.reserve(pop.size() * static_cast<std::size_t>(policy.checkpoint_interval));

  bool equilibrated = false;
  std::uint64_t steps = 0;
  while (!equilibrated && steps < policy.max_steps) {
    const std::uint64_t chunk = std::min(policy.checkpoint_interval, policy.max_steps - steps);
    window.clear();
    for (std::uint64_t s = 0; s < chunk; ++s) {
      mc_step(pop, model, rng);
      window.insert(window.end(), pop.wealth.begin(), pop.wealth.end());
    }
    steps += chunk;
    equilibrated = detector.update(build_histogram(window, bins));
    result.summary.max_drift = std::max(result.summary.max_drift, pop.conservation_drift());
  }
  result.summary.equilibration_steps = steps;
  result.summary.converged = equilibrated;

  result.samples.reserve(pop.size() * sample_steps);
  for (std::uint64_t s = 0; s < sample_steps; ++s) {
    mc_step(pop, model, rng);
    result.samples.insert(result.samples.end(), pop.wealth.begin(), pop.wealth.end());
  }
  result.summary.max_drift = std::max(result.summary.max_drift, pop.conservation_drift());

  const SummaryStats stats = moments(result.samples);
  result.summary.mean = stats.mean;
  result.summary.variance = stats.variance;
  return result;
}

RealizationResult run_realization(const SimulationConfig& config, const ModelSpec& model,
                                  std::uint64_t realization_index) {
  RandomStream rng(config.master_seed, realization_index);
  AgentPopulation pop = init_population(config, model, rng);
  RealizationResult result =
      equilibrate_and_sample(pop, model, config.equilibration, config.sample_steps, rng);
  result.summary.index = realization_index;
  return result;
}

EnsembleResult ensemble_run(const SimulationConfig& config, const ModelSpec& model,
                            unsigned threads) {
  config.validate();
  model.validate();

  const std::uint64_t n_realizations = config.realizations;
  std::vector<RealizationResult> results(n_realizations);

  unsigned n_threads = threads != 0 ? threads : std::thread::hardware_concurrency();
  n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(n_realizations)));

  if (n_threads == 1) {
    for (std::uint64_t r = 0; r < n_realizations; ++r) {
      results[r] = run_realization(config, model, r);
    }
  } else {
    std::atomic<std::uint64_t> next{0};
    auto worker = [&]() {
      for (std::uint64_t r = next.fetch_add(1); r < n_realizations; r = next.fetch_add(1)) {
        results[r] = run_realization(config, model, r);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  EnsembleResult ensemble;
  ensemble.realizations.reserve(n_realizations);
  std::size_t total_samples = 0;
  for (const RealizationResult& r : results) total_samples += r.samples.size();
  ensemble.samples.reserve(total_samples);
  for (RealizationResult& r : results) {
    ensemble.samples.insert(ensemble.samples.end(), r.samples.begin(), r.samples.end());
    ensemble.all_converged = ensemble.all_converged && r.summary.converged;
    ensemble.realizations.push_back(r.summary);
  }
  return ensemble;
}

}  // namespace kwex
