#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kwex/io.hpp"

namespace {

struct CommonOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  unsigned threads = 0;
};

void add_overrides(CLI::App* cmd, CommonOverrides& overrides) {
  cmd->add_option("--seed", overrides.seed, "Master seed (overrides the config file)");
  cmd->add_option("--out", overrides.out_dir, "Output directory (overrides output.dir)");
  cmd->add_option("--format", overrides.format, "Output format: csv, json, or both")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  cmd->add_option("--threads", overrides.threads,
                  "Worker threads for realizations (0 = hardware count)");
}

kwex::RunManifest load_manifest(const std::string& config_path,
                                const CommonOverrides& overrides) {
  kwex::RunManifest manifest = kwex::parse_config(config_path);
  if (overrides.seed) manifest.config.master_seed = *overrides.seed;
  if (overrides.out_dir) manifest.output.dir = *overrides.out_dir;
  if (overrides.format) {
    manifest.output.csv = *overrides.format != "json";
    manifest.output.json = *overrides.format != "csv";
  }
  return manifest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinetic wealth-exchange simulator and distribution fitter"};
  app.require_subcommand(1);

  std::string config_path;
  CommonOverrides overrides;

  CLI::App* simulate = app.add_subcommand("simulate", "Run one model to equilibrium and sample");
  simulate->add_option("--config", config_path, "Run configuration file")->required();
  add_overrides(simulate, overrides);

  std::vector<double> lambda_grid;
  CLI::App* sweep = app.add_subcommand("sweep", "Simulate a grid of saving propensities");
  sweep->add_option("--config", config_path, "Run configuration file")->required();
  sweep->add_option("--lambda-grid", lambda_grid, "Comma-separated saving propensities")
      ->required()
      ->delimiter(',');
  add_overrides(sweep, overrides);

  std::string data_path;
  std::string column = "0";
  std::string family = "auto";
  std::string bulk = "lognormal";
  std::string fit_out = ".";
  CLI::App* fit = app.add_subcommand("fit", "Fit a distribution family to a dataset column");
  fit->add_option("data", data_path, "Delimited text dataset")->required();
  fit->add_option("--column", column, "Column index (0-based) or exact header name");
  fit->add_option("--family", family,
                  "auto, exponential, gamma, lognormal, powerlaw, or piecewise");
  fit->add_option("--bulk", bulk, "Piecewise bulk family: gamma or lognormal")
      ->check(CLI::IsMember({"gamma", "lognormal"}));
  fit->add_option("--out", fit_out, "Output directory");

  CLI::App* ingest = app.add_subcommand("ingest-check", "Report dataset cleaning statistics");
  ingest->add_option("data", data_path, "Delimited text dataset")->required();
  ingest->add_option("--column", column, "Column index (0-based) or exact header name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kwex::exit_ok : kwex::exit_config_error;
  }

  try {
    if (simulate->parsed()) {
      return kwex::cmd_simulate(load_manifest(config_path, overrides), overrides.threads);
    }
    if (sweep->parsed()) {
      return kwex::cmd_sweep(load_manifest(config_path, overrides), lambda_grid,
                             overrides.threads);
    }
    if (fit->parsed()) {
      kwex::OutputOptions output;
      output.dir = fit_out;
      return kwex::cmd_fit(kwex::ingest_dataset(data_path, column), family,
                           bulk == "gamma" ? kwex::BulkFamily::Gamma
                                           : kwex::BulkFamily::LogNormal,
                           output);
    }
    return kwex::cmd_ingest_check(kwex::ingest_dataset(data_path, column));
  } catch (const kwex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kwex::exit_config_error;
  } catch (const kwex::FitError& e) {
    std::cerr << "fit error: " << e.what() << '\n';
    return kwex::exit_fit_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
