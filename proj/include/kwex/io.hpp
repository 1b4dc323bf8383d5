#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kwex/fitting.hpp"
#include "kwex/simulation.hpp"
#include "kwex/version.hpp"

namespace kwex {

/// Process exit codes shared by all commands.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_non_convergence = 3;
inline constexpr int exit_fit_error = 4;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OutputOptions {
  std::filesystem::path dir = ".";
  bool csv = true;
  bool json = true;
  int bins = 100;
  std::size_t ccdf_max_points = 100000;
};

/// Fully resolved run description: simulation config, model, and output
/// policy. Everything a command needs to be reproducible byte for byte.
struct RunManifest {
  SimulationConfig config{};
  ModelSpec model{};
  OutputOptions output{};
  std::string version = artifact_version;
};

/// Parses the flat key-value configuration format (one `key = value` per
/// line, `#` comments). Unknown keys and out-of-domain values raise
/// ConfigError naming the key.
RunManifest parse_config_text(std::string_view text);
RunManifest parse_config(const std::filesystem::path& path);

struct IngestedDataset {
  std::vector<double> values;  // strictly positive after cleaning
  std::string source;
  std::size_t dropped = 0;  // non-numeric / non-positive / short rows
};

/// Reads one numeric column from a delimited text file (comma, tab, or
/// whitespace). `column` is a 0-based index or an exact header name; a header
/// row is detected and skipped. Non-positive and unparseable entries are
/// dropped and counted. Throws ConfigError when nothing valid remains.
IngestedDataset ingest_dataset(const std::filesystem::path& path, const std::string& column);

/// Runs the ensemble and writes histogram.csv / ccdf.csv (csv format) and
/// summary.json (json format) into output.dir. Returns exit_ok, or
/// exit_non_convergence when a realization hit the step cap. Partial files
/// are removed if writing fails.
int cmd_simulate(const RunManifest& manifest, unsigned threads = 0);

/// One simulate run per lambda (uniform-saving model) in subdirectories
/// lambda_<value>/, plus sweep.csv across the grid. A failing cell aborts
/// with the cell named and removes everything this call created.
int cmd_sweep(const RunManifest& manifest, const std::vector<double>& lambda_grid,
              unsigned threads = 0);

/// Normalizes the dataset to unit mean, fits the requested family ("auto",
/// "exponential", "gamma", "lognormal", "powerlaw", "piecewise"; auto =
/// piecewise), and writes fit.json + overlay.csv.
int cmd_fit(const IngestedDataset& dataset, const std::string& family, BulkFamily bulk,
            const OutputOptions& output);

/// Prints a cleaning report for the dataset (row counts, range, mean).
int cmd_ingest_check(const IngestedDataset& dataset);

}  // namespace kwex
