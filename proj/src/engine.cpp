#include "sgdlab/engine.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <set>
#include <stdexcept>

namespace sgdlab {

Vec sgd_step(const Vec& w, const Vec& g, double eta) {
  if (w.size() != g.size()) {
    throw std::invalid_argument("sgd_step: dimension mismatch (" + std::to_string(w.size()) +
                                " vs " + std::to_string(g.size()) + ")");
  }
  if (!(eta > 0)) throw std::invalid_argument("sgd_step: eta must be > 0");
  return w - eta * g;
}

std::vector<std::int64_t> checkpoint_grid(const RunConfig& cfg) {
  if (cfg.T < 1) throw std::invalid_argument("checkpoint_grid: T must be >= 1");
  std::set<std::int64_t> grid;
  grid.insert(1);
  grid.insert(cfg.T);
  if (cfg.checkpoint_policy == CheckpointPolicy::geometric2) {
    for (std::int64_t t = 1; t <= cfg.T && t > 0; t *= 2) grid.insert(t);
  } else {
    for (std::int64_t t : cfg.explicit_checkpoints) {
      if (t >= 1 && t <= cfg.T) grid.insert(t);
    }
  }
  return {grid.begin(), grid.end()};
}

Trace run(const Objective& obj, const Schedule& sched, const RunConfig& cfg) {
  const auto grid = checkpoint_grid(cfg);
  const int n = obj.n_samples();

  Trace trace;
  trace.seed = cfg.seed;
  trace.checkpoints.reserve(grid.size());

  Pcg32 rng = make_stream(cfg.seed, StreamId::run);
  Vec w = zero_param(obj.dim());
  double guard = std::numeric_limits<double>::infinity();
  std::size_t next_ckpt = 0;

  for (std::int64_t t = 1; t <= cfg.T; ++t) {
    const double eta = sched.eta(t);
    if (next_ckpt < grid.size() && grid[next_ckpt] == t) {
      ++next_ckpt;
      const double risk = obj.value(w);
      const double grad_sq = obj.grad(w).squaredNorm();
      trace.checkpoints.push_back({t, risk, grad_sq, eta});
      if (t == 1) guard = cfg.divergence_factor * std::max(risk, 1.0);
      if (!std::isfinite(risk) || risk > guard) {
        trace.diverged = true;
        break;
      }
    }

    const int i = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(n)));
    const double s = loss_deriv(obj.loss(), obj.predict(w, i), obj.target(i));

    if (cfg.diagnostics) {
      StepDiag diag;
      diag.t = t;
      diag.eta = eta;
      diag.risk_before = obj.value(w);
      const Vec pop_grad = obj.grad(w);
      diag.inner = s * obj.design().row(i).dot(pop_grad);
      diag.grad_sq = s * s * obj.design().row(i).squaredNorm();
      w -= (eta * s) * obj.design().row(i).transpose();
      diag.risk_after = obj.value(w);
      trace.step_diags.push_back(diag);
    } else {
      w -= (eta * s) * obj.design().row(i).transpose();
    }

    if (!std::isfinite(w.squaredNorm())) {
      trace.diverged = true;
      break;
    }
  }

  trace.final_iterate = std::move(w);
  return trace;
}

AggregateTrace aggregate_traces(const std::vector<Trace>& traces, const Schedule& sched) {
  if (traces.empty()) throw std::invalid_argument("aggregate_traces: no traces");

  std::vector<const Trace*> live;
  AggregateTrace agg;
  for (const Trace& tr : traces) {
    if (tr.diverged) {
      agg.diverged_seeds.push_back(tr.seed);
    } else {
      live.push_back(&tr);
    }
  }
  if (live.empty()) throw std::runtime_error("aggregate_traces: all seeds diverged");
  agg.n_seeds = static_cast<int>(live.size());

  const auto& grid = live.front()->checkpoints;
  for (const Trace* tr : live) {
    if (tr->checkpoints.size() != grid.size()) {
      throw std::invalid_argument("aggregate_traces: traces disagree on checkpoints");
    }
  }

  double eta_sum = 0.0;
  std::int64_t summed_to = 0;
  double min_prefix = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    AggregatePoint pt;
    pt.t = grid[k].t;
    for (const Trace* tr : live) {
      if (tr->checkpoints[k].t != pt.t) {
        throw std::invalid_argument("aggregate_traces: traces disagree on checkpoints");
      }
      pt.mean_risk += tr->checkpoints[k].risk;
      pt.mean_grad_norm_sq += tr->checkpoints[k].grad_norm_sq;
    }
    pt.mean_risk /= agg.n_seeds;
    pt.mean_grad_norm_sq /= agg.n_seeds;
    min_prefix = std::min(min_prefix, pt.mean_grad_norm_sq);
    pt.min_prefix_grad_norm_sq = min_prefix;
    while (summed_to < pt.t) eta_sum += sched.eta(++summed_to);
    pt.eta_sum = eta_sum;
    agg.checkpoints.push_back(pt);
  }
  return agg;
}

MultiRunResult run_multi(const Objective& obj, const Schedule& sched,
                         const RunConfig& base, const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("run_multi: seeds must be nonempty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw std::invalid_argument("run_multi: seeds must be pairwise distinct");
  }

  // Seeds are independent; futures are collected in supply order, so the
  // result does not depend on scheduling.
  std::vector<std::future<Trace>> futures;
  futures.reserve(seeds.size());
  for (std::uint64_t s : seeds) {
    RunConfig cfg = base;
    cfg.seed = s;
    futures.push_back(std::async(std::launch::async,
                                 [&obj, &sched, cfg]() { return run(obj, sched, cfg); }));
  }

  MultiRunResult result;
  result.traces.reserve(seeds.size());
  for (auto& f : futures) result.traces.push_back(f.get());
  result.aggregate = aggregate_traces(result.traces, sched);
  return result;
}

}  // namespace sgdlab
