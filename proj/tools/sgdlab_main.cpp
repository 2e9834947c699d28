// sgdlab command-line front end: run / sweep / verify / fit.
#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "sgdlab/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sgdlab: SGD experiments over exactly-computable finite-population objectives"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string aggregate_path;
  std::string window = "1:1e18";
  std::string axis = "iteration";
  std::string series = "min_prefix";
  double offset = 0.0;

  auto* run = app.add_subcommand("run", "execute a multi-seed experiment from a config");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory (overrides config)");

  auto* sweep = app.add_subcommand("sweep", "cartesian sweep over schedule parameter lists");
  sweep->add_option("--config", config_path, "experiment config (JSON)")->required();
  sweep->add_option("--out", out_dir, "output directory (overrides config)");

  auto* verify = app.add_subcommand("verify", "run the certificate property checks");
  verify->add_option("--config", config_path, "experiment config (JSON)")->required();
  verify->add_option("--out", out_dir, "report path (default verify.json)");

  auto* fit = app.add_subcommand("fit", "rate fit and bound-ratio check on an aggregate");
  fit->add_option("--aggregate", aggregate_path, "aggregate.json from a run")->required();
  fit->add_option("--window", window, "checkpoint window lo:hi (default all)");
  fit->add_option("--axis", axis, "abscissa: iteration | eta_sum");
  fit->add_option("--series", series, "min_prefix | mean_risk | mean_grad_norm_sq");
  fit->add_option("--offset", offset, "value subtracted from the series (e.g. E(w*))");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (run->parsed()) return sgdlab::cmd_run(config_path, out_dir);
  if (sweep->parsed()) return sgdlab::cmd_sweep(config_path, out_dir);
  if (verify->parsed()) return sgdlab::cmd_verify(config_path, out_dir);
  if (fit->parsed()) {
    double lo = 1.0, hi = 1e18;
    const auto colon = window.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument(window);
      lo = std::stod(window.substr(0, colon));
      hi = std::stod(window.substr(colon + 1));
    } catch (const std::exception&) {
      std::cerr << "fit: bad --window '" << window << "', expected lo:hi\n";
      return 2;
    }
    return sgdlab::cmd_fit(aggregate_path, lo, hi, axis, series, offset);
  }
  return 2;
}
