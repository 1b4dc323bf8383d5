#include "kwex/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "json.hpp"

namespace kwex {

namespace {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// config parsing

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

class KeyValueFile {
 public:
  explicit KeyValueFile(std::string_view text) {
    std::size_t line_no = 0;
    for (std::size_t pos = 0; pos <= text.size();) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      std::string_view line = trim(text.substr(pos, end - pos));
      pos = end + 1;
      ++line_no;
      if (line.empty() || line.front() == '#') continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": expected 'key = value', got '" + std::string(line) + "'");
      }
      const std::string key{trim(line.substr(0, eq))};
      const std::string value{trim(line.substr(eq + 1))};
      if (key.empty()) {
        throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
      }
      if (!entries_.emplace(key, value).second) {
        throw ConfigError("config key '" + key + "' given more than once");
      }
    }
  }

  std::optional<std::string> take(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    std::string value = it->second;
    entries_.erase(it);
    return value;
  }

  void finish() const {
    if (!entries_.empty()) {
      throw ConfigError("unknown config key '" + entries_.begin()->first + "'");
    }
  }

 private:
  std::map<std::string, std::string> entries_;
};

double parse_double_value(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double x = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(x)) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a finite number, got '" + value + "'");
  }
}

std::uint64_t parse_u64_value(const std::string& key, const std::string& value) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "': expected an unsigned integer, got '" + value +
                      "'");
  }
  return x;
}

double take_double(KeyValueFile& file, const std::string& key, double fallback, double lo,
                   double hi, bool lo_open = false, bool hi_open = false) {
  const auto raw = file.take(key);
  const double x = raw.has_value() ? parse_double_value(key, *raw) : fallback;
  const bool ok = (lo_open ? x > lo : x >= lo) && (hi_open ? x < hi : x <= hi);
  if (!ok) {
    std::ostringstream msg;
    msg << "config key '" << key << "': value " << x << " outside " << (lo_open ? '(' : '[') << lo
        << ", " << hi << (hi_open ? ')' : ']');
    throw ConfigError(msg.str());
  }
  return x;
}

std::uint64_t take_u64(KeyValueFile& file, const std::string& key, std::uint64_t fallback,
                       std::uint64_t min_value) {
  const auto raw = file.take(key);
  const std::uint64_t x = raw.has_value() ? parse_u64_value(key, *raw) : fallback;
  if (x < min_value) {
    throw ConfigError("config key '" + key + "': must be >= " + std::to_string(min_value));
  }
  return x;
}

ModelSpec parse_model(KeyValueFile& file) {
  const auto name = file.take("model");
  if (!name.has_value()) throw ConfigError("missing required config key 'model'");

  const auto lambda = file.take("lambda");
  const auto lambda_lo = file.take("lambda_lo");
  const auto lambda_hi = file.take("lambda_hi");
  auto reject_lambda_keys = [&](const char* model_name) {
    if (lambda || lambda_lo || lambda_hi) {
      throw ConfigError(std::string("config key 'lambda*' does not apply to model=") +
                        model_name);
    }
  };

  try {
    if (*name == "no_saving") {
      reject_lambda_keys("no_saving");
      return ModelSpec::no_saving();
    }
    if (*name == "bidirectional") {
      reject_lambda_keys("bidirectional");
      return ModelSpec::bidirectional();
    }
    if (*name == "uniform_saving") {
      if (lambda_lo || lambda_hi) {
        throw ConfigError("config keys 'lambda_lo'/'lambda_hi' apply only to distributed_saving");
      }
      if (!lambda) throw ConfigError("model=uniform_saving requires config key 'lambda'");
      const double l = parse_double_value("lambda", *lambda);
      if (!(l >= 0.0 && l <= 1.0)) {
        throw ConfigError("config key 'lambda': value outside [0, 1]");
      }
      return ModelSpec::uniform_saving(l);
    }
    if (*name == "distributed_saving") {
      if (lambda && (lambda_lo || lambda_hi)) {
        throw ConfigError("config key 'lambda' (delta law) conflicts with 'lambda_lo'/'lambda_hi'");
      }
      if (lambda) {
        const double l = parse_double_value("lambda", *lambda);
        if (!(l >= 0.0 && l < 1.0)) {
          throw ConfigError("config key 'lambda': value outside [0, 1) for distributed_saving");
        }
        return ModelSpec::distributed_saving(LambdaLaw::delta(l));
      }
      const double lo = lambda_lo ? parse_double_value("lambda_lo", *lambda_lo) : 0.0;
      const double hi = lambda_hi ? parse_double_value("lambda_hi", *lambda_hi) : 0.9999;
      if (!(lo >= 0.0 && lo <= hi && hi < 1.0)) {
        throw ConfigError("config keys 'lambda_lo'/'lambda_hi': need 0 <= lambda_lo <= lambda_hi < 1");
      }
      return ModelSpec::distributed_saving(LambdaLaw::uniform(lo, hi));
    }
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("invalid model parameters: ") + err.what());
  }
  throw ConfigError("config key 'model': expected one of no_saving, uniform_saving, "
                    "distributed_saving, bidirectional; got '" + *name + "'");
}

}  // namespace

RunManifest parse_config_text(std::string_view text) {
  KeyValueFile file(text);
  RunManifest manifest;

  manifest.model = parse_model(file);

  const auto n_agents_raw = file.take("n_agents");
  if (!n_agents_raw.has_value()) throw ConfigError("missing required config key 'n_agents'");
  const std::uint64_t n_agents = parse_u64_value("n_agents", *n_agents_raw);
  if (n_agents < 2) throw ConfigError("config key 'n_agents': must be >= 2");
  manifest.config.n_agents = static_cast<std::size_t>(n_agents);

  const auto seed_raw = file.take("seed");
  if (!seed_raw.has_value()) throw ConfigError("missing required config key 'seed'");
  manifest.config.master_seed = parse_u64_value("seed", *seed_raw);

  manifest.config.total_wealth =
      take_double(file, "total_wealth", static_cast<double>(n_agents), 0.0,
                  std::numeric_limits<double>::max(), /*lo_open=*/true);

  if (const auto init = file.take("init")) {
    if (*init == "uniform_equal") {
      manifest.config.init = InitScheme::UniformEqual;
    } else if (*init == "random_uniform") {
      manifest.config.init = InitScheme::RandomUniform;
    } else {
      throw ConfigError("config key 'init': expected uniform_equal or random_uniform, got '" +
                        *init + "'");
    }
  }

  manifest.config.realizations = take_u64(file, "realizations", 100, 1);
  manifest.config.sample_steps = take_u64(file, "sample_steps", 20, 1);

  EquilibrationPolicy& eq = manifest.config.equilibration;
  eq.checkpoint_interval = take_u64(file, "equilibration.checkpoint_interval", 100, 1);
  eq.ks_tolerance = take_double(file, "equilibration.ks_tolerance", 0.01, 0.0, 1.0,
                                /*lo_open=*/true, /*hi_open=*/true);
  eq.consecutive_passes =
      static_cast<int>(take_u64(file, "equilibration.consecutive_passes", 3, 1));
  eq.max_steps = take_u64(file, "equilibration.max_steps", 20000, 1);
  if (eq.max_steps < eq.checkpoint_interval) {
    throw ConfigError("config key 'equilibration.max_steps': must be >= checkpoint_interval");
  }

  if (const auto dir = file.take("output.dir")) manifest.output.dir = *dir;
  if (const auto format = file.take("output.format")) {
    if (*format == "csv") {
      manifest.output.csv = true;
      manifest.output.json = false;
    } else if (*format == "json") {
      manifest.output.csv = false;
      manifest.output.json = true;
    } else if (*format == "both") {
      manifest.output.csv = manifest.output.json = true;
    } else {
      throw ConfigError("config key 'output.format': expected csv, json, or both; got '" +
                        *format + "'");
    }
  }
  manifest.output.bins = static_cast<int>(take_u64(file, "output.bins", 100, 1));
  manifest.output.ccdf_max_points =
      static_cast<std::size_t>(take_u64(file, "output.ccdf_max_points", 100000, 2));

  file.finish();
  manifest.config.validate();
  manifest.model.validate();
  return manifest;
}

RunManifest parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

// ---------------------------------------------------------------------------
// dataset ingestion

namespace {

std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> fields;
  if (delim == ' ') {
    std::istringstream stream(line);
    std::string field;
    while (stream >> field) fields.push_back(field);
    return fields;
  }
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(delim, pos);
    fields.emplace_back(trim(line.substr(pos, next - pos)));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return fields;
}

std::optional<double> parse_field(const std::string& field) {
  try {
    std::size_t used = 0;
    const double x = std::stod(field, &used);
    if (used != field.size() || !std::isfinite(x)) return std::nullopt;
    return x;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

IngestedDataset ingest_dataset(const std::filesystem::path& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset file: " + path.string());

  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) lines.push_back(line);
  }
  if (lines.empty()) throw ConfigError("dataset file is empty: " + path.string());

  const char delim = lines.front().find(',') != std::string::npos   ? ','
                     : lines.front().find('\t') != std::string::npos ? '\t'
                                                                     : ' ';

  const bool by_index = !column.empty() &&
                        std::all_of(column.begin(), column.end(),
                                    [](unsigned char c) { return std::isdigit(c); });
  std::size_t index = 0;
  std::size_t first_data_row = 0;
  const auto header = split_fields(lines.front(), delim);
  if (by_index) {
    index = static_cast<std::size_t>(std::stoull(column));
    // A non-numeric leading row is a header.
    if (index < header.size() && !parse_field(header[index]).has_value()) first_data_row = 1;
  } else {
    const auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) {
      throw ConfigError("dataset column '" + column + "' not found in header of " +
                        path.string());
    }
    index = static_cast<std::size_t>(it - header.begin());
    first_data_row = 1;
  }

  IngestedDataset dataset;
  dataset.source = path.string();
  for (std::size_t row = first_data_row; row < lines.size(); ++row) {
    const auto fields = split_fields(lines[row], delim);
    if (index >= fields.size()) {
      ++dataset.dropped;
      continue;
    }
    const auto value = parse_field(fields[index]);
    if (!value.has_value() || *value <= 0.0) {
      ++dataset.dropped;
      continue;
    }
    dataset.values.push_back(*value);
  }
  if (dataset.values.empty()) {
    throw ConfigError("dataset has no valid positive values in column '" + column + "': " +
                      path.string());
  }
  return dataset;
}

// ---------------------------------------------------------------------------
// output writing

namespace {

std::string g17(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

/// Tracks files created by one command so a failure can remove them all.
class FileTracker {
 public:
  std::ofstream create(const std::filesystem::path& p) {
    std::filesystem::create_directories(p.parent_path());
    created_.push_back(p);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + p.string());
    return out;
  }

  void remove_all() {
    for (const auto& p : created_) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
    created_.clear();
  }

 private:
  std::vector<std::filesystem::path> created_;
};

CcdfCurve decimate(const CcdfCurve& curve, std::size_t max_points) {
  if (curve.points.size() <= max_points) return curve;
  CcdfCurve out;
  out.points.reserve(max_points);
  const std::size_t last = curve.points.size() - 1;
  std::size_t prev = static_cast<std::size_t>(-1);
  for (std::size_t i = 0; i < max_points; ++i) {
    const std::size_t k = last * i / (max_points - 1);
    if (k != prev) out.points.push_back(curve.points[k]);
    prev = k;
  }
  return out;
}

void write_histogram_csv(std::ofstream out, const Histogram& hist) {
  out << "bin_left,bin_right,count,density\n";
  for (std::size_t k = 0; k < hist.n_bins(); ++k) {
    out << g17(hist.edges[k]) << ',' << g17(hist.edges[k + 1]) << ',' << hist.counts[k] << ','
        << g17(hist.density(k)) << '\n';
  }
}

void write_ccdf_csv(std::ofstream out, const CcdfCurve& curve) {
  out << "w,fraction\n";
  for (const auto& p : curve.points) out << g17(p.w) << ',' << g17(p.fraction) << '\n';
}

ordered_json fit_to_json(const FitResult& fit) {
  ordered_json j;
  j["family"] = to_string(fit.family);
  auto set = [&](const char* name, double value) {
    if (std::isfinite(value)) j[name] = value;
  };
  set("T", fit.T);
  set("n", fit.n);
  set("alpha", fit.alpha);
  set("w_min", fit.w_min);
  set("mu", fit.mu);
  set("sigma", fit.sigma);
  set("w_c", fit.w_c);
  if (fit.family == FitFamily::PiecewiseBulkTail) {
    j["bulk_family"] = to_string(fit.bulk_family);
    set("tail_mass", fit.tail_mass);
    set("ks_bulk", fit.ks_bulk);
    set("ks_tail", fit.ks_tail);
  }
  set("ks", fit.ks);
  j["n_used"] = fit.n_used;
  j["warnings"] = fit.warnings;
  return j;
}

ordered_json model_to_json(const ModelSpec& model) {
  ordered_json j;
  j["variant"] = to_string(model.variant);
  if (model.variant == ModelVariant::UniformSaving) j["lambda"] = model.lambda;
  if (model.variant == ModelVariant::DistributedSaving) {
    j["lambda_law"] = model.lambda_law.kind == LambdaLaw::Kind::Delta ? "delta" : "uniform";
    j["lambda_lo"] = model.lambda_law.lo;
    j["lambda_hi"] = model.lambda_law.hi;
  }
  return j;
}

ordered_json manifest_to_json(const RunManifest& manifest) {
  const SimulationConfig& c = manifest.config;
  ordered_json j;
  j["model"] = model_to_json(manifest.model);
  j["n_agents"] = c.n_agents;
  j["total_wealth"] = c.total_wealth;
  j["init"] = c.init == InitScheme::UniformEqual ? "uniform_equal" : "random_uniform";
  j["realizations"] = c.realizations;
  j["sample_steps"] = c.sample_steps;
  j["equilibration"] = {{"checkpoint_interval", c.equilibration.checkpoint_interval},
                        {"ks_tolerance", c.equilibration.ks_tolerance},
                        {"consecutive_passes", c.equilibration.consecutive_passes},
                        {"max_steps", c.equilibration.max_steps}};
  j["output"] = {{"dir", manifest.output.dir.string()},
                 {"format", manifest.output.csv && manifest.output.json ? "both"
                            : manifest.output.csv                       ? "csv"
                                                                        : "json"},
                 {"bins", manifest.output.bins},
                 {"ccdf_max_points", manifest.output.ccdf_max_points}};
  return j;
}

struct SimulateArtifacts {
  EnsembleResult ensemble;
  Histogram histogram;
  SummaryStats stats;
  std::vector<std::pair<std::string, FitResult>> fits;
  std::vector<std::string> fit_errors;
};

/// Fits run on the strictly positive subset where the family demands it;
/// dropped counts surface as warnings instead of failures.
void run_family_fits(SimulateArtifacts& artifacts, const ModelSpec& model) {
  const std::vector<double>& samples = artifacts.ensemble.samples;
  std::vector<double> positive;
  positive.reserve(samples.size());
  for (double x : samples) {
    if (x > 0.0) positive.push_back(x);
  }
  const std::size_t n_dropped = samples.size() - positive.size();

  auto attempt = [&](const std::string& name, auto&& fn) {
    try {
      FitResult fit = fn();
      if (n_dropped > 0 && fit.n_used == positive.size()) {
        fit.warnings.push_back("dropped " + std::to_string(n_dropped) +
                               " non-positive samples before fitting");
      }
      artifacts.fits.emplace_back(name, std::move(fit));
    } catch (const FitError& err) {
      artifacts.fit_errors.push_back(name + ": " + err.what());
    }
  };

  attempt("exponential", [&] { return fit_exponential(samples); });
  attempt("gamma", [&] { return fit_gamma(positive); });
  if (model.variant == ModelVariant::DistributedSaving) {
    attempt("powerlaw_tail", [&] { return fit_powerlaw_tail(positive); });
  }
}

SimulateArtifacts run_simulate(const RunManifest& manifest, unsigned threads) {
  SimulateArtifacts artifacts;
  artifacts.ensemble = ensemble_run(manifest.config, manifest.model, threads);
  artifacts.histogram = build_histogram(
      artifacts.ensemble.samples,
      BinScheme::linear_auto(artifacts.ensemble.samples, manifest.output.bins));
  artifacts.stats = summarize(artifacts.ensemble.samples, artifacts.histogram);
  run_family_fits(artifacts, manifest.model);
  return artifacts;
}

ordered_json summary_to_json(const RunManifest& manifest, const SimulateArtifacts& artifacts) {
  const EnsembleResult& ensemble = artifacts.ensemble;
  ordered_json j;
  j["artifact_version"] = manifest.version;
  j["master_seed"] = manifest.config.master_seed;
  j["config"] = manifest_to_json(manifest);

  const SummaryStats& s = artifacts.stats;
  j["n_samples"] = ensemble.samples.size();
  j["moments"] = {{"mean", s.mean}, {"variance", s.variance}, {"m1", s.m1},
                  {"m2", s.m2},     {"m3", s.m3},             {"m4", s.m4}};
  j["mode_bin_center"] = s.mode_bin_center;
  j["gini"] = s.gini;

  ordered_json fits = ordered_json::object();
  for (const auto& [name, fit] : artifacts.fits) fits[name] = fit_to_json(fit);
  j["fits"] = fits;
  j["fit_errors"] = artifacts.fit_errors;

  double max_drift = 0.0;
  std::uint64_t n_converged = 0;
  ordered_json realizations = ordered_json::array();
  for (const RealizationSummary& r : ensemble.realizations) {
    max_drift = std::max(max_drift, r.max_drift);
    n_converged += r.converged ? 1 : 0;
    realizations.push_back({{"index", r.index},
                            {"equilibration_steps", r.equilibration_steps},
                            {"converged", r.converged},
                            {"mean", r.mean},
                            {"variance", r.variance},
                            {"max_drift", r.max_drift}});
  }
  j["equilibration"] = {{"all_converged", ensemble.all_converged},
                        {"n_converged", n_converged},
                        {"n_realizations", ensemble.realizations.size()},
                        {"max_drift", max_drift},
                        {"realizations", realizations}};
  return j;
}

void write_simulate_outputs(const RunManifest& manifest, const SimulateArtifacts& artifacts,
                            FileTracker& tracker) {
  const std::filesystem::path& dir = manifest.output.dir;
  if (manifest.output.csv) {
    write_histogram_csv(tracker.create(dir / "histogram.csv"), artifacts.histogram);
    write_ccdf_csv(tracker.create(dir / "ccdf.csv"),
                   decimate(empirical_ccdf(artifacts.ensemble.samples),
                            manifest.output.ccdf_max_points));
  }
  if (manifest.output.json) {
    tracker.create(dir / "summary.json") << summary_to_json(manifest, artifacts).dump(2) << '\n';
  }
}

}  // namespace

int cmd_simulate(const RunManifest& manifest, unsigned threads) {
  FileTracker tracker;
  try {
    const SimulateArtifacts artifacts = run_simulate(manifest, threads);
    write_simulate_outputs(manifest, artifacts, tracker);
    if (!artifacts.ensemble.all_converged) {
      std::cerr << "warning: equilibration step cap hit; results flagged in summary\n";
      return exit_non_convergence;
    }
    return exit_ok;
  } catch (...) {
    tracker.remove_all();
    throw;
  }
}

int cmd_sweep(const RunManifest& manifest, const std::vector<double>& lambda_grid,
              unsigned threads) {
  if (lambda_grid.empty()) throw ConfigError("lambda grid must be non-empty");
  for (double l : lambda_grid) {
    if (!(l >= 0.0 && l < 1.0)) {
      throw ConfigError("lambda grid value " + g17(l) + " outside [0, 1)");
    }
  }

  FileTracker tracker;
  bool all_converged = true;
  std::ostringstream rows;
  try {
    for (double lambda : lambda_grid) {
      RunManifest cell = manifest;
      cell.model = ModelSpec::uniform_saving(lambda);
      char label[32];
      std::snprintf(label, sizeof(label), "lambda_%g", lambda);
      cell.output.dir = manifest.output.dir / label;

      SimulateArtifacts artifacts;
      try {
        artifacts = run_simulate(cell, threads);
        const auto gamma_it =
            std::find_if(artifacts.fits.begin(), artifacts.fits.end(),
                         [](const auto& f) { return f.first == "gamma"; });
        if (gamma_it == artifacts.fits.end()) {
          throw std::runtime_error("gamma fit unavailable: " +
                                   (artifacts.fit_errors.empty() ? std::string("unknown")
                                                                 : artifacts.fit_errors.front()));
        }
        write_simulate_outputs(cell, artifacts, tracker);

        const SummaryStats& s = artifacts.stats;
        rows << g17(lambda) << ',' << g17(s.mean) << ',' << g17(s.variance) << ','
             << g17(s.mode_bin_center) << ',' << g17(gamma_it->second.n) << ','
             << g17(gamma_it->second.T) << ',' << g17(s.gini) << '\n';
        all_converged = all_converged && artifacts.ensemble.all_converged;
      } catch (const std::exception& err) {
        throw std::runtime_error("sweep cell lambda=" + std::string(label + 7) +
                                 " failed: " + err.what());
      }
    }

    auto out = tracker.create(manifest.output.dir / "sweep.csv");
    out << "lambda,mean,variance,mode_bin,gamma_n,gamma_T,gini\n" << rows.str();
  } catch (...) {
    tracker.remove_all();
    throw;
  }
  if (!all_converged) {
    std::cerr << "warning: equilibration step cap hit; results flagged in summaries\n";
    return exit_non_convergence;
  }
  return exit_ok;
}

int cmd_fit(const IngestedDataset& dataset, const std::string& family, BulkFamily bulk,
            const OutputOptions& output) {
  const std::vector<double> normalized = normalize_by_mean(dataset.values);
  const double mean = moments(dataset.values).mean;

  FitResult fit;
  try {
    if (family == "auto" || family == "piecewise") {
      PiecewiseOptions options;
      options.bulk = bulk;
      fit = fit_piecewise(normalized, options);
    } else if (family == "exponential") {
      fit = fit_exponential(normalized);
    } else if (family == "gamma") {
      fit = fit_gamma(normalized);
    } else if (family == "lognormal") {
      fit = fit_lognormal(normalized);
    } else if (family == "powerlaw") {
      fit = fit_powerlaw_tail(normalized);
    } else {
      throw ConfigError("unknown fit family '" + family +
                        "': expected auto, exponential, gamma, lognormal, powerlaw, or piecewise");
    }
  } catch (const FitError& err) {
    std::cerr << "fit failed (" << family << "): " << err.what() << '\n';
    return exit_fit_error;
  }

  FileTracker tracker;
  try {
    ordered_json j;
    j["artifact_version"] = artifact_version;
    j["source"] = dataset.source;
    j["n_values"] = dataset.values.size();
    j["dropped_rows"] = dataset.dropped;
    j["normalization_mean"] = mean;
    j["family_requested"] = family;
    j["fit"] = fit_to_json(fit);
    tracker.create(output.dir / "fit.json") << j.dump(2) << '\n';

    auto out = tracker.create(output.dir / "overlay.csv");
    out << "w,empirical_ccdf,model_ccdf\n";
    const CcdfCurve curve = decimate(empirical_ccdf(normalized), output.ccdf_max_points);
    for (const auto& p : curve.points) {
      out << g17(p.w) << ',' << g17(p.fraction) << ',' << g17(model_ccdf(fit, p.w)) << '\n';
    }
  } catch (...) {
    tracker.remove_all();
    throw;
  }
  return exit_ok;
}

int cmd_ingest_check(const IngestedDataset& dataset) {
  const SummaryStats s = moments(dataset.values);
  const auto [min_it, max_it] = std::minmax_element(dataset.values.begin(), dataset.values.end());
  std::cout << "source: " << dataset.source << '\n'
            << "values: " << dataset.values.size() << '\n'
            << "dropped_rows: " << dataset.dropped << '\n'
            << "min: " << g17(*min_it) << '\n'
            << "max: " << g17(*max_it) << '\n'
            << "mean: " << g17(s.mean) << '\n';
  return exit_ok;
}

}  // namespace kwex
