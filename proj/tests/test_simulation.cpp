#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "kwex/simulation.hpp"
#include "oracles.hpp"

using namespace kwex;

namespace {

SimulationConfig small_config(std::size_t n_agents, std::uint64_t seed) {
  SimulationConfig config;
  config.n_agents = n_agents;
  config.total_wealth = static_cast<double>(n_agents);  // unit mean wealth
  config.master_seed = seed;
  return config;
}

}  // namespace

TEST_CASE("deterministic stream replays bit-exactly and separates indices") {
  RandomStream a(123, 7);
  RandomStream b(123, 7);
  RandomStream c(123, 8);
  bool all_equal = true;
  bool any_diff = false;
  for (int i = 0; i < 10000; ++i) {
    const double ua = a.next_unit();
    all_equal = all_equal && (ua == b.next_unit());
    any_diff = any_diff || (ua != c.next_unit());
    REQUIRE(ua >= 0.0);
    REQUIRE(ua < 1.0);
  }
  CHECK(all_equal);
  CHECK(any_diff);

  RandomStream d(99, 0);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t v = d.next_index(7);
    REQUIRE(v < 7);
  }
}

TEST_CASE("population initialization") {
  RandomStream rng(5, 0);
  SimulationConfig config = small_config(4, 5);
  config.total_wealth = 8.0;
  const AgentPopulation equal = init_population(config, ModelSpec::no_saving(), rng);
  CHECK(equal.wealth == std::vector<double>{2.0, 2.0, 2.0, 2.0});
  CHECK(equal.lambdas.empty());
  CHECK(equal.total == 8.0);

  SimulationConfig random_config = small_config(2, 5);
  random_config.total_wealth = 1.0;
  random_config.init = InitScheme::RandomUniform;
  const AgentPopulation random = init_population(random_config, ModelSpec::no_saving(), rng);
  CHECK(random.wealth[0] >= 0.0);
  CHECK(random.wealth[1] >= 0.0);
  CHECK(random.sum_wealth() == doctest::Approx(1.0).epsilon(1e-12));

  SimulationConfig ccm_config = small_config(100, 5);
  const ModelSpec ccm = ModelSpec::distributed_saving(LambdaLaw::uniform(0.0, 0.5));
  const AgentPopulation hetero = init_population(ccm_config, ccm, rng);
  REQUIRE(hetero.lambdas.size() == 100);
  for (double l : hetero.lambdas) {
    REQUIRE(l >= 0.0);
    REQUIRE(l < 0.5);
  }
}

TEST_CASE("exchange sweeps mutate in place and conserve the total") {
  SimulationConfig config = small_config(2, 17);
  RandomStream rng(17, 0);
  AgentPopulation pop = init_population(config, ModelSpec::no_saving(), rng);
  pop.wealth = {1.0, 3.0};
  pop.total = 4.0;

  sweep_exchanges(pop, ModelSpec::no_saving(), rng, 0);
  CHECK(pop.wealth == std::vector<double>{1.0, 3.0});
  CHECK(pop.exchanges == 0);

  // A twin stream predicts the engine's draw order exactly: pair first
  // (ordered index then offset), then the split fraction.
  RandomStream engine(42, 3);
  RandomStream twin(42, 3);
  AgentPopulation two;
  two.wealth = {1.0, 3.0};
  two.total = 4.0;
  sweep_exchanges(two, ModelSpec::no_saving(), engine, 1);

  const std::size_t i = static_cast<std::size_t>(twin.next_index(2));
  std::size_t j = static_cast<std::size_t>(twin.next_index(1));
  if (j >= i) ++j;
  const double r = twin.next_unit();
  const ExchangeOutcome expected = exchange_no_saving(i == 0 ? 1.0 : 3.0, i == 0 ? 3.0 : 1.0, r);
  CHECK(two.wealth[i] == expected.wi_new);
  CHECK(two.wealth[j] == expected.wj_new);
  CHECK(two.exchanges == 1);
}

TEST_CASE("one Monte Carlo step is N exchanges") {
  SimulationConfig config = small_config(200, 3);
  RandomStream rng(3, 0);
  AgentPopulation pop = init_population(config, ModelSpec::uniform_saving(0.4), rng);
  mc_step(pop, ModelSpec::uniform_saving(0.4), rng);
  CHECK(pop.exchanges == 200);
  mc_step(pop, ModelSpec::uniform_saving(0.4), rng);
  CHECK(pop.exchanges == 400);
  CHECK(pop.conservation_drift() <= 1e-9);

  AgentPopulation pair;
  pair.wealth = {1.0, 1.0};
  pair.total = 2.0;
  mc_step(pair, ModelSpec::no_saving(), rng);
  CHECK(pair.exchanges == 2);
}

TEST_CASE("equilibrium detector needs a streak of stable checkpoints") {
  const BinScheme scheme = BinScheme::linear(2, 0.0, 2.0);
  const Histogram left = build_histogram(std::vector<double>{0.5}, scheme);
  const Histogram right = build_histogram(std::vector<double>{1.5}, scheme);

  EquilibrationPolicy policy;
  policy.checkpoint_interval = 1;
  policy.max_steps = 1;
  policy.ks_tolerance = 0.5;
  policy.consecutive_passes = 1;

  EquilibriumDetector detector(policy);
  CHECK_FALSE(detector.update(left));  // baseline only
  CHECK(detector.update(left));        // identical: distance 0

  EquilibriumDetector reset_detector(policy);
  CHECK_FALSE(reset_detector.update(left));
  CHECK_FALSE(reset_detector.update(right));  // disjoint bins: distance 1, streak resets
  CHECK(reset_detector.passes() == 0);
  CHECK(reset_detector.update(right));

  // A distance exactly at the tolerance counts as a pass.
  const Histogram half = build_histogram(std::vector<double>{0.5, 1.5}, scheme);
  const Histogram skew = build_histogram(std::vector<double>{0.5, 0.5, 0.5, 1.5}, scheme);
  CHECK(histogram_ks(half, skew) == 0.25);
  EquilibrationPolicy boundary = policy;
  boundary.ks_tolerance = 0.25;
  EquilibriumDetector boundary_detector(boundary);
  CHECK_FALSE(boundary_detector.update(half));
  CHECK(boundary_detector.update(skew));

  // Streak length follows consecutive_passes.
  EquilibrationPolicy three = policy;
  three.consecutive_passes = 3;
  EquilibriumDetector streak(three);
  CHECK_FALSE(streak.update(left));
  CHECK_FALSE(streak.update(left));
  CHECK_FALSE(streak.update(left));
  CHECK(streak.update(left));
}

TEST_CASE("pooled equilibrium samples keep the conserved mean") {
  SimulationConfig config = small_config(200, 77);
  config.realizations = 1;
  config.sample_steps = 20;
  const RealizationResult result = run_realization(config, ModelSpec::no_saving(), 0);
  CHECK(result.summary.converged);
  CHECK(result.samples.size() == 200 * 20);
  CHECK(result.summary.mean == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(result.summary.max_drift <= 1e-9);
}

TEST_CASE("no-saving equilibrium is exponential with zero modal wealth") {
  SimulationConfig config = small_config(1000, 31);
  config.sample_steps = 100;
  const RealizationResult result = run_realization(config, ModelSpec::no_saving(), 0);
  REQUIRE(result.samples.size() == 100000);

  const double d =
      ks_distance(result.samples, [](double w) { return 1.0 - std::exp(-w); });
  CHECK(d < 0.02);

  const Histogram h = build_histogram(result.samples, BinScheme::linear_auto(result.samples, 50));
  CHECK(h.mode_bin_center() < h.bin_width(0));  // most probable wealth is the lowest bin
}

TEST_CASE("stronger saving narrows the equilibrium distribution") {
  SimulationConfig config = small_config(1000, 9);
  config.sample_steps = 10;
  const RealizationResult low = run_realization(config, ModelSpec::uniform_saving(0.3), 0);
  const RealizationResult high = run_realization(config, ModelSpec::uniform_saving(0.9), 0);
  CHECK(high.summary.variance < low.summary.variance);
}

TEST_CASE("fifty thousand exchanges at two hundred agents give an exponential") {
  // 225 steps of burn-in plus 25 pooled steps is exactly 50000 exchanges.
  SimulationConfig config = small_config(200, 2024);
  RandomStream rng(config.master_seed, 0);
  AgentPopulation pop = init_population(config, ModelSpec::no_saving(), rng);
  sweep_exchanges(pop, ModelSpec::no_saving(), rng, 45000);

  // The KS null assumes independent samples, so pool every fifth step:
  // consecutive populations are correlated (an agent averages two exchanges
  // per step), and five steps apart that correlation is negligible.
  std::vector<double> pooled;
  pooled.reserve(200 * 5);
  for (int s = 1; s <= 25; ++s) {
    mc_step(pop, ModelSpec::no_saving(), rng);
    if (s % 5 == 0) pooled.insert(pooled.end(), pop.wealth.begin(), pop.wealth.end());
  }
  REQUIRE(pop.exchanges == 50000);
  REQUIRE(pooled.size() == 1000);

  const double d = ks_distance(pooled, [](double w) { return 1.0 - std::exp(-w); });
  CHECK(d < oracle::ks_critical(pooled.size(), 0.01));
}

TEST_CASE("hitting the step cap flags the run instead of truncating it") {
  SimulationConfig config = small_config(50, 4);
  config.equilibration.ks_tolerance = 0.001;  // unreachable at this population size
  config.equilibration.max_steps = 300;
  config.sample_steps = 5;
  const RealizationResult result = run_realization(config, ModelSpec::no_saving(), 0);
  CHECK_FALSE(result.summary.converged);
  CHECK(result.summary.equilibration_steps == 300);
  CHECK(result.samples.size() == 50 * 5);
}

TEST_CASE("ensembles merge deterministically") {
  SimulationConfig config = small_config(100, 555);
  config.realizations = 4;
  config.sample_steps = 5;
  const ModelSpec model = ModelSpec::uniform_saving(0.5);

  const EnsembleResult serial = ensemble_run(config, model, 1);
  const EnsembleResult threaded = ensemble_run(config, model, 3);
  const EnsembleResult replay = ensemble_run(config, model, 1);

  REQUIRE(serial.samples.size() == 4 * 100 * 5);
  CHECK(serial.samples == threaded.samples);
  CHECK(serial.samples == replay.samples);
  CHECK(serial.realizations.size() == 4);

  // A single-realization ensemble is exactly run_realization.
  config.realizations = 1;
  const EnsembleResult single = ensemble_run(config, model, 1);
  const RealizationResult direct = run_realization(config, model, 0);
  CHECK(single.samples == direct.samples);
}

TEST_CASE("relabeled initial states are statistically indistinguishable") {
  SimulationConfig config = small_config(1000, 1);
  config.init = InitScheme::RandomUniform;
  config.sample_steps = 100;
  const RealizationResult one = run_realization(config, ModelSpec::no_saving(), 0);
  config.master_seed = 2;
  const RealizationResult two = run_realization(config, ModelSpec::no_saving(), 0);
  REQUIRE(one.samples.size() >= 100000);
  CHECK(oracle::two_sample_ks(one.samples, two.samples) < 0.02);
}

TEST_CASE("per-agent saving draws are redrawn per realization") {
  SimulationConfig config = small_config(50, 12);
  const ModelSpec ccm = ModelSpec::distributed_saving(LambdaLaw::uniform(0.0, 0.9));
  RandomStream rng_a(config.master_seed, 0);
  RandomStream rng_b(config.master_seed, 1);
  const AgentPopulation a = init_population(config, ccm, rng_a);
  const AgentPopulation b = init_population(config, ccm, rng_b);
  CHECK(a.lambdas != b.lambdas);
}
