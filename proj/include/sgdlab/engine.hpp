#pragma once

#include <cstdint>
#include <vector>

#include "sgdlab/core.hpp"
#include "sgdlab/objectives.hpp"
#include "sgdlab/schedules.hpp"

namespace sgdlab {

enum class CheckpointPolicy { geometric2, explicit_list };

struct RunConfig {
  std::int64_t T = 1;
  std::uint64_t seed = 0;
  CheckpointPolicy checkpoint_policy = CheckpointPolicy::geometric2;
  std::vector<std::int64_t> explicit_checkpoints;
  double divergence_factor = 1e6;
  bool diagnostics = false;  // per-step recording, intended for T <= 1e3
};

/// w - eta * g as a fresh vector; inputs untouched. Throws on dimension
/// mismatch or eta <= 0.
Vec sgd_step(const Vec& w, const Vec& g, double eta);

/// The checkpoint grid a run records at: {1, 2, 4, ...} union {T} for the
/// geometric policy, or the explicit list clipped to [1, T]; 1 and T are
/// always included.
std::vector<std::int64_t> checkpoint_grid(const RunConfig& cfg);

/// Iterate w_{t+1} = w_t - eta_t grad f(w_t, z_{i_t}) from w_1 = 0, with
/// i_t drawn uniformly with replacement from the run stream of cfg.seed.
/// Records (t, E(w_t), ||grad E(w_t)||^2, eta_t) at each checkpoint.
/// Sets diverged (no exception) when the risk exceeds
/// divergence_factor * max(E(w_1), 1) or the iterate goes non-finite.
Trace run(const Objective& obj, const Schedule& sched, const RunConfig& cfg);

struct MultiRunResult {
  std::vector<Trace> traces;  // one per supplied seed, same order
  AggregateTrace aggregate;
};

/// Seed-mean aggregate over the shared checkpoint grid; diverged seeds are
/// excluded from the means and reported. Throws if traces is empty or all
/// diverged.
AggregateTrace aggregate_traces(const std::vector<Trace>& traces, const Schedule& sched);

/// One run per seed (seeds must be distinct; may execute concurrently)
/// plus the aggregate. Throws std::runtime_error if every seed diverged.
MultiRunResult run_multi(const Objective& obj, const Schedule& sched,
                         const RunConfig& base, const std::vector<std::uint64_t>& seeds);

}  // namespace sgdlab
