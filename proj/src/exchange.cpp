#include "kwex/exchange.hpp"

#include <cmath>
#include <stdexcept>

namespace kwex {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

void check_wealth(double wi, double wj) {
  require(std::isfinite(wi) && wi >= 0.0, "wealth wi must be finite and >= 0");
  require(std::isfinite(wj) && wj >= 0.0, "wealth wj must be finite and >= 0");
}

void check_fraction(double x, const char* name) {
  if (!(std::isfinite(x) && x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
  }
}

void check_saving(double x, const char* name) {
  if (!(std::isfinite(x) && x >= 0.0 && x < 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0,1)");
  }
}

}  // namespace

std::string to_string(ModelVariant variant) {
  switch (variant) {
    case ModelVariant::NoSaving: return "no_saving";
    case ModelVariant::UniformSaving: return "uniform_saving";
    case ModelVariant::DistributedSaving: return "distributed_saving";
    case ModelVariant::BiDirectional: return "bidirectional";
  }
  return "unknown";
}

LambdaLaw LambdaLaw::delta(double lambda0) {
  LambdaLaw law{Kind::Delta, lambda0, lambda0};
  law.validate();
  return law;
}

LambdaLaw LambdaLaw::uniform(double lo, double hi) {
  LambdaLaw law{Kind::Uniform, lo, hi};
  law.validate();
  return law;
}

void LambdaLaw::validate() const {
  require(std::isfinite(lo) && std::isfinite(hi), "lambda law bounds must be finite");
  require(0.0 <= lo && lo <= hi && hi < 1.0, "lambda law bounds must satisfy 0 <= lo <= hi < 1");
  if (kind == Kind::Delta) require(lo == hi, "delta lambda law must have lo == hi");
}

ModelSpec ModelSpec::no_saving() { return ModelSpec{ModelVariant::NoSaving, 0.0, {}}; }

ModelSpec ModelSpec::uniform_saving(double lambda) {
  ModelSpec model{ModelVariant::UniformSaving, lambda, {}};
  model.validate();
  return model;
}

ModelSpec ModelSpec::distributed_saving(LambdaLaw law) {
  ModelSpec model{ModelVariant::DistributedSaving, 0.0, law};
  model.validate();
  return model;
}

ModelSpec ModelSpec::bidirectional() { return ModelSpec{ModelVariant::BiDirectional, 0.0, {}}; }

void ModelSpec::validate() const {
  switch (variant) {
    case ModelVariant::UniformSaving:
      check_fraction(lambda, "lambda");
      break;
    case ModelVariant::DistributedSaving:
      lambda_law.validate();
      break;
    case ModelVariant::NoSaving:
    case ModelVariant::BiDirectional:
      break;
  }
}

ExchangeOutcome exchange_no_saving(double wi, double wj, double r) {
  check_wealth(wi, wj);
  check_fraction(r, "r");
  const double sum = wi + wj;
  return {r * sum, (1.0 - r) * sum};
}

// The uniform rule is evaluated with the same expression tree as the
// distributed rule at li == lj, so the reduction chain holds bit-exactly.
ExchangeOutcome exchange_uniform_saving(double wi, double wj, double lambda, double r) {
  check_wealth(wi, wj);
  check_fraction(lambda, "lambda");
  check_fraction(r, "r");
  const double pool = (1.0 - lambda) * wi + (1.0 - lambda) * wj;
  return {lambda * wi + r * pool, lambda * wj + (1.0 - r) * pool};
}

ExchangeOutcome exchange_distributed_saving(double wi, double wj, double li, double lj,
                                            double r) {
  check_wealth(wi, wj);
  check_saving(li, "li");
  check_saving(lj, "lj");
  check_fraction(r, "r");
  const double pool = (1.0 - li) * wi + (1.0 - lj) * wj;
  return {li * wi + r * pool, lj * wj + (1.0 - r) * pool};
}

ExchangeOutcome exchange_bidirectional(double wi, double wj, double r, double q) {
  check_wealth(wi, wj);
  check_fraction(r, "r");
  check_fraction(q, "q");
  return {r * wi + q * wj, (1.0 - r) * wi + (1.0 - q) * wj};
}

}  // namespace kwex
