#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgdlab/core.hpp"
#include "sgdlab/engine.hpp"
#include "sgdlab/kernel.hpp"
#include "sgdlab/objectives.hpp"
#include "sgdlab/schedules.hpp"

namespace sgdlab {

/// Config problem with the offending field path in the message.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct SyntheticSpec {
  int n = 100;
  int d = 10;
  std::uint64_t seed = 1;
  bool planted = true;
  double noise = 0.0;
  InputLaw law = InputLaw::gaussian;
};

struct DatasetSpec {
  std::optional<std::string> path;        // CSV file
  std::optional<SyntheticSpec> synthetic; // exactly one of the two is set
};

struct ObjectiveSpec {
  std::string family = "least_squares";
  double c = 1.0;
  double alpha_loss = 0.5;
  DatasetSpec dataset;
};

struct ScheduleSpec {
  std::string kind = "polynomial";
  // sweepable parameters; a single value is a 1-element list
  std::vector<double> eta1{0.1};
  std::vector<double> theta{0.75};
  std::vector<double> beta{2.0};
  std::vector<double> eta{0.1};
};

struct KernelSpec {
  std::string kind = "linear";
  double sigma = 0.0;  // gaussian: 0 means the median heuristic
};

struct ProbeSpec {
  std::int64_t n = 10000;
  double radius = 10.0;
  double tol = 1e-8;
  std::uint64_t seed = 2718281828u;
  double fd_h_rel = 1e-5;
  double fd_tol = 1e-5;
  int fd_points = 100;
  double L_override = 0.0;  // diagnostic: verify against a forced L (> 0)
};

struct ExperimentConfig {
  ObjectiveSpec objective;
  ScheduleSpec schedule;
  std::optional<KernelSpec> kernel;
  std::int64_t T = 1000;
  std::vector<std::uint64_t> seeds{1};
  std::string checkpoint_policy = "geometric2";
  std::vector<std::int64_t> explicit_checkpoints;
  double divergence_factor = 1e6;
  std::string out = "out";
  ProbeSpec probes;
};

ExperimentConfig load_config(const std::string& path);      // throws ConfigError
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);
std::string effective_config_json(const ExperimentConfig& cfg);  // all defaults echoed

/// Materialized experiment pieces built from a config (the schedule uses
/// the objective's certificates where it needs alpha, L, or mu).
struct BuiltExperiment {
  Objective objective;
  Schedule schedule;
  std::optional<PLScheduleCert> pl_cert;
  std::optional<Kernel> kernel;
  RunConfig run_config;
};

Dataset build_dataset(const DatasetSpec& spec);
Objective build_objective(const ObjectiveSpec& spec);
BuiltExperiment build_experiment(const ExperimentConfig& cfg);  // first sweep cell

/// Subcommand bodies (the CLI binary is a thin wrapper). Exit codes:
/// 0 success, 1 check/assertion failure, 2 usage or config error.
int cmd_run(const std::string& config_path, const std::string& out_override,
            const std::vector<std::uint64_t>& seeds_override = {});
int cmd_verify(const std::string& config_path, const std::string& out_override);
int cmd_fit(const std::string& aggregate_path, double t_min, double t_max,
            const std::string& axis, const std::string& series, double offset);
int cmd_sweep(const std::string& config_path, const std::string& out_override,
              const std::vector<std::uint64_t>& seeds_override = {});

}  // namespace sgdlab
