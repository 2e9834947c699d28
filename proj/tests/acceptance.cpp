// Acceptance suite: one gate per shipped guarantee, one PASS/FAIL line each.
// Exit code is the number of failed gates. Every tolerance is pinned here.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "sgdlab/analysis.hpp"
#include "sgdlab/config.hpp"
#include "sgdlab/engine.hpp"
#include "sgdlab/io.hpp"
#include "sgdlab/kernel.hpp"

using namespace sgdlab;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void gate(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %d. %s — %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// Fixed experiment inputs. Sphere-law inputs give every sample the same
// norm, so L = d exactly and the second-moment spectrum is well
// conditioned; both rate experiments rely on that.
constexpr std::uint64_t kPropertyDataSeed = 11;   // n=100, d=10 property/rate dataset
constexpr std::uint64_t kRateDataSeed = 12;       // n=400, d=10 reciprocal-schedule dataset
constexpr std::uint64_t kInterpSeed = 7;          // n=50, d=100 interpolation dataset
constexpr std::uint64_t kFdProbeSeed = 1003;      // gradient-oracle probe stream
constexpr double kNoiseSigma = 0.5;

Dataset property_dataset() {
  return synthetic_regression(100, 10, kPropertyDataSeed, kNoiseSigma, InputLaw::sphere).data;
}

struct NamedObjective {
  std::string name;
  Objective obj;
};

std::vector<NamedObjective> property_objectives() {
  const Dataset data = property_dataset();
  std::vector<NamedObjective> objs;
  objs.push_back({"least_squares", make_least_squares(data)});
  objs.push_back({"welsch(c=1)", make_welsch(data, 1.0)});
  for (double a : {0.3, 0.5, 0.7}) {
    objs.push_back({fmt("holder_p(%.1f)", a), make_holder_p(data, a)});
  }
  return objs;
}

std::vector<std::int64_t> rate_checkpoints(std::int64_t T) {
  std::vector<std::int64_t> list;
  for (std::int64_t t = 1; t <= T; t *= 2) list.push_back(t);
  for (std::int64_t t : {1000, 10000, 90000, 95000, 100000}) {
    if (t <= T) list.push_back(t);
  }
  return list;
}

double min_prefix_at(const AggregateTrace& agg, std::int64_t t) {
  for (const auto& pt : agg.checkpoints) {
    if (pt.t == t) return pt.min_prefix_grad_norm_sq;
  }
  return std::nan("");
}

std::vector<std::uint64_t> seed_range(int count) {
  std::vector<std::uint64_t> seeds;
  for (int s = 1; s <= count; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
  return seeds;
}

// ---------------------------------------------------------------------------
// 1. certificate property suite: 0 violations at 1e4 probes, tol 1e-8
// ---------------------------------------------------------------------------
void criterion_1() {
  Timer timer;
  std::int64_t total_violations = 0;
  double worst = 0.0;
  std::string worst_name;
  for (const auto& [name, obj] : property_objectives()) {
    const ViolationReport reps[] = {
        check_holder(obj, 10000, 10.0, 1e-8),
        check_smooth_a(obj, 10000, 10.0, 1e-8),
        check_self_bounding(obj, 10000, 10.0, 1e-8),
    };
    for (const auto& rep : reps) {
      total_violations += rep.n_violations;
      if (rep.worst_ratio > worst) {
        worst = rep.worst_ratio;
        worst_name = name;
      }
    }
  }
  const double elapsed = timer.seconds();
  gate(1, "smoothness/self-bounding/descent property suite",
       total_violations == 0 && elapsed <= 60.0,
       fmt("violations=%lld over 5 objectives x 3 checks x 1e4 probes, worst ratio %.9f (%s), %.1fs (<=60s)",
           static_cast<long long>(total_violations), worst, worst_name.c_str(), elapsed));
}

// ---------------------------------------------------------------------------
// 2. gradient oracle: analytic vs central differences, rel err <= 1e-5
// ---------------------------------------------------------------------------
void criterion_2() {
  Timer timer;
  double worst = 0.0;
  std::string worst_name;
  for (const auto& [name, obj] : property_objectives()) {
    Pcg32 rng = make_stream(kFdProbeSeed, StreamId::probe);
    for (int k = 0; k < 100; ++k) {
      const Vec w = sample_in_ball(rng, obj.dim(), 10.0);
      const Vec fd = finite_diff_grad([&](const Vec& v) { return obj.value(v); }, w, 1e-5);
      const Vec an = obj.grad(w);
      const double rel = (fd - an).norm() / an.norm();
      if (rel > worst) {
        worst = rel;
        worst_name = name;
      }
    }
  }
  gate(2, "finite-difference gradient oracle", worst <= 1e-5,
       fmt("max rel err %.3e (<=1e-5), worst on %s, 100 points/objective, %.1fs",
           worst, worst_name.c_str(), timer.seconds()));
}

// shared outputs for the convergence-proxy gate
struct RateRun {
  std::vector<Trace> traces;
  AggregateTrace aggregate;
  double optimum = 0.0;
};

// ---------------------------------------------------------------------------
// 3. gradient-norm bound: min_prefix * sum(eta) stays bounded, and the
//    min-prefix statistic keeps decaying over two decades
// ---------------------------------------------------------------------------
RateRun criterion_3() {
  Timer timer;
  const Objective obj = make_welsch(property_dataset(), 1.0);
  const Schedule sched = poly_schedule(1.0 / obj.smoothness().L, 0.75, obj.smoothness().alpha);

  RunConfig cfg;
  cfg.T = 100000;
  cfg.checkpoint_policy = CheckpointPolicy::explicit_list;
  cfg.explicit_checkpoints = rate_checkpoints(cfg.T);
  auto result = run_multi(obj, sched, cfg, seed_range(20));

  const auto ratio = bound_ratio_check(result.aggregate, 1000.0, 100000.0);
  const double spread = ratio.max_ratio / ratio.median_ratio;
  const double decay = min_prefix_at(result.aggregate, 100000) / min_prefix_at(result.aggregate, 1000);
  const auto diverged = result.aggregate.diverged_seeds.size();
  const double elapsed = timer.seconds();

  gate(3, "polynomial-schedule gradient bound (welsch)",
       spread <= 10.0 && decay <= 0.1 && diverged == 0 && elapsed <= 300.0,
       fmt("max/median ratio %.2f (<=10), min_prefix decay %.4f (<=0.1), diverged %zu, %.1fs (<=300s)",
           spread, decay, diverged, elapsed));
  return {std::move(result.traces), std::move(result.aggregate), 0.0};
}

// ---------------------------------------------------------------------------
// 4. reciprocal schedule on a PL-certified objective: suboptimality decays
//    like 1/t over the fit window
// ---------------------------------------------------------------------------
RateRun criterion_4() {
  Timer timer;
  const Objective obj = make_least_squares(
      synthetic_regression(400, 10, kRateDataSeed, kNoiseSigma, InputLaw::sphere).data);
  auto [sched, cert] = pl_schedule(obj.pl()->mu, obj.smoothness());

  RunConfig cfg;
  cfg.T = 100000;
  cfg.checkpoint_policy = CheckpointPolicy::explicit_list;
  cfg.explicit_checkpoints = rate_checkpoints(cfg.T);
  auto result = run_multi(obj, sched, cfg, seed_range(20));

  const double opt = obj.pl()->optimum_value;
  std::vector<std::pair<double, double>> sub;
  for (const auto& pt : result.aggregate.checkpoints) {
    sub.emplace_back(static_cast<double>(pt.t), pt.mean_risk - opt);
  }
  const RateFit fit = fit_rate(sub, 1000.0, 100000.0);
  const auto diverged = result.aggregate.diverged_seeds.size();
  const double elapsed = timer.seconds();

  // every fit-window checkpoint sits past the contraction threshold t0
  const bool window_valid = cert.t0 <= 1000.0;
  gate(4, "reciprocal-schedule 1/t suboptimality rate (PL least squares)",
       fit.slope >= -1.3 && fit.slope <= -0.8 && window_valid && diverged == 0 &&
           elapsed <= 300.0,
       fmt("slope %.3f (in [-1.3,-0.8]), r2 %.3f, t0 %.0f (<=1000), diverged %zu, %.1fs (<=300s)",
           fit.slope, fit.r_squared, cert.t0, diverged, elapsed));
  return {std::move(result.traces), std::move(result.aggregate), opt};
}

// ---------------------------------------------------------------------------
// 5. zero-variance interpolation + constant step: geometric decay at least
//    75% of the certified log-rate, and per-step mean contraction
// ---------------------------------------------------------------------------
void criterion_5() {
  Timer timer;
  const Objective obj = make_interpolating_least_squares(50, 100, kInterpSeed);
  const double mu = obj.pl()->mu;
  const double L = obj.smoothness().L;
  const double eta = mu / (L * L);
  const Schedule sched = const_schedule(eta, *obj.pl(), obj.smoothness());

  RunConfig cfg;
  cfg.T = 2000;
  cfg.checkpoint_policy = CheckpointPolicy::explicit_list;
  for (std::int64_t t = 1; t <= cfg.T; ++t) cfg.explicit_checkpoints.push_back(t);
  auto result = run_multi(obj, sched, cfg, seed_range(10));

  std::vector<std::pair<double, double>> sub;  // optimum value is exactly 0
  for (const auto& pt : result.aggregate.checkpoints) {
    sub.emplace_back(static_cast<double>(pt.t), pt.mean_risk);
  }
  const RateFit fit = fit_semilog(sub, 1.0, 2000.0);
  const double log_rate = std::log1p(-mu * eta);
  const double slope_limit = log_rate + std::abs(log_rate) * 0.25;

  double worst_ratio = 0.0;
  for (std::size_t k = 0; k + 1 < sub.size(); ++k) {
    worst_ratio = std::max(worst_ratio, sub[k + 1].second / sub[k].second);
  }
  const double ratio_limit = 1.0 - mu * eta + 0.05;
  const double elapsed = timer.seconds();

  gate(5, "linear convergence under interpolation (constant step)",
       sched.theorem_valid() && fit.slope <= slope_limit && worst_ratio <= ratio_limit &&
           result.aggregate.diverged_seeds.empty() && elapsed <= 60.0,
       fmt("slope %.3e (<= %.3e), worst step ratio %.6f (<= %.6f), mu*eta %.2e, %.1fs (<=60s)",
           fit.slope, slope_limit, worst_ratio, ratio_limit, mu * eta, elapsed));
}

// ---------------------------------------------------------------------------
// 6. per-seed convergence proxy on the two rate runs
// ---------------------------------------------------------------------------
void criterion_6(const RateRun& welsch_run, const RateRun& pl_run) {
  const double final_risk = welsch_run.aggregate.checkpoints.back().mean_risk;
  const auto welsch_check =
      as_convergence_check(welsch_run.traces, 0.9, 0.1 * final_risk);

  const double final_sub = pl_run.aggregate.checkpoints.back().mean_risk - pl_run.optimum;
  const double grad_eps = 10.0 * pl_run.aggregate.checkpoints.back().min_prefix_grad_norm_sq;
  const auto pl_check = as_convergence_check(pl_run.traces, 0.9, 10.0 * final_sub, grad_eps);

  gate(6, "tail-stability convergence proxy (both rate runs)",
       welsch_check.n_pass >= 19 && pl_check.n_pass >= 19,
       fmt("welsch run %d/20 seeds (eps=%.2e), PL run %d/20 seeds (eps=%.2e, grad<=%.2e)",
           welsch_check.n_pass, 0.1 * final_risk, pl_check.n_pass, 10.0 * final_sub, grad_eps));
}

// ---------------------------------------------------------------------------
// 7. linear-kernel functional SGD is the parametric recursion in disguise
// ---------------------------------------------------------------------------
void criterion_7() {
  Timer timer;
  const Dataset data = property_dataset();
  const Objective obj = make_least_squares(data);
  const Schedule sched = poly_schedule(1.0 / obj.smoothness().L, 0.75, 1.0);
  const LossFamilyParams squared{LossFamily::least_squares, 1.0, 1.0};
  Kernel lin{Kernel::Kind::linear, 1.0};

  const std::int64_t T = 1000;
  std::vector<std::int64_t> ckpts;
  for (std::int64_t t = 1; t <= T; t *= 2) ckpts.push_back(t);
  ckpts.push_back(T);

  Pcg32 indices = make_stream(5, StreamId::run);  // one stream drives both paths
  Vec w = zero_param(data.d());
  RepresenterState state{lin, {}, {}};
  double worst_pred = 0.0, worst_grad = 0.0;
  std::size_t next = 0;

  for (std::int64_t t = 1; t <= T; ++t) {
    if (next < ckpts.size() && ckpts[next] == t) {
      ++next;
      for (int j = 0; j < data.n(); ++j) {
        const double para = data.X().row(j).dot(w);
        const double func = predict(state, data.X().row(j).transpose());
        worst_pred = std::max(worst_pred, std::abs(para - func));
      }
      const double pg = obj.grad(w).squaredNorm();
      const double rk = rkhs_grad_norm_sq(state, data, squared);
      worst_grad = std::max(worst_grad, std::abs(rk - pg) / pg);
    }
    const double eta = sched.eta(t);
    const int i = static_cast<int>(indices.next_below(static_cast<std::uint32_t>(data.n())));
    kernel_sgd_step(state, data.sample(i), eta, squared);
    const double s = loss_deriv(squared, data.X().row(i).dot(w), data.y()(i));
    w -= (eta * s) * data.X().row(i).transpose();
  }

  gate(7, "linear-kernel equivalence oracle",
       worst_pred <= 1e-10 && worst_grad <= 1e-10,
       fmt("max |pred diff| %.2e (<=1e-10) at %d points x %zu checkpoints, max grad rel diff %.2e (<=1e-10), %.1fs",
           worst_pred, data.n(), ckpts.size(), worst_grad, timer.seconds()));
}

// ---------------------------------------------------------------------------
// 8. schedule guard rails: an invalid constant step is flagged and diverges,
//    and summability flags match their analytic predicates exhaustively
// ---------------------------------------------------------------------------
void criterion_8() {
  Timer timer;
  const Objective obj = make_interpolating_least_squares(50, 100, kInterpSeed);
  const double L = obj.smoothness().L;
  const Schedule bad = const_schedule(4.0 / L, *obj.pl(), obj.smoothness());

  RunConfig cfg;
  cfg.T = 2000;
  int diverged = 0;
  double worst_ratio = 0.0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    cfg.seed = s;
    const Trace tr = run(obj, bad, cfg);
    if (tr.diverged) {
      ++diverged;
    } else {
      for (std::size_t k = 0; k + 1 < tr.checkpoints.size(); ++k) {
        worst_ratio = std::max(worst_ratio,
                               tr.checkpoints[k + 1].risk / tr.checkpoints[k].risk);
      }
    }
  }
  const double mu_eta = obj.pl()->mu * 4.0 / L;
  const bool guard_shown = diverged == 10 || worst_ratio > 1.0 - mu_eta + 0.05;

  int flag_mismatches = 0;
  for (int ti = 1; ti <= 10; ++ti) {
    for (int ai = 1; ai <= 10; ++ai) {
      const double theta = 0.05 + 0.09 * ti;
      const double alpha = 0.1 * ai;
      const Schedule s = poly_schedule(1.0, theta, alpha);
      const auto rep = summability_report(s, alpha, 8);
      if (rep.flags.sum_eta_power_convergent != (theta * (1.0 + alpha) > 1.0)) ++flag_mismatches;
      if (!rep.flags.sum_eta_divergent) ++flag_mismatches;
    }
  }

  gate(8, "invalid-schedule failure mode and summability flags",
       !bad.theorem_valid() && guard_shown && flag_mismatches == 0,
       fmt("flagged invalid=%s, diverged %d/10 seeds, flag mismatches %d/100 grid cells, %.1fs",
           bad.theorem_valid() ? "no" : "yes", diverged, flag_mismatches, timer.seconds()));
}

// ---------------------------------------------------------------------------
// 9. rerunning an experiment from its config is byte-identical
// ---------------------------------------------------------------------------
void criterion_9() {
  Timer timer;
  const fs::path dir = fs::temp_directory_path() / "sgdlab_acceptance";
  fs::create_directories(dir);
  const std::string config = R"({
  "objective": {
    "family": "welsch", "c": 1.0,
    "dataset": {"synthetic": {"n": 100, "d": 10, "seed": 11, "planted": true, "noise": 0.5, "law": "sphere"}}
  },
  "schedule": {"kind": "polynomial", "eta1": 0.1, "theta": 0.75},
  "T": 20000,
  "seeds": [1, 2, 3, 4, 5],
  "checkpoints": {"policy": "geometric2"}
})";
  const fs::path cfg_path = dir / "experiment.json";
  write_text_file(cfg_path.string(), config);

  const fs::path out1 = dir / "run1";
  const fs::path out2 = dir / "run2";
  const int rc1 = cmd_run(cfg_path.string(), out1.string());
  const int rc2 = cmd_run(cfg_path.string(), out2.string());

  bool identical = rc1 == 0 && rc2 == 0;
  int files = 0;
  if (identical) {
    for (const auto& entry : fs::directory_iterator(out1)) {
      const auto name = entry.path().filename();
      if (name.string().rfind("trace_seed", 0) == 0 || name == "aggregate.json") {
        ++files;
        if (read_text_file(entry.path().string()) !=
            read_text_file((out2 / name).string())) {
          identical = false;
        }
      }
    }
  }
  gate(9, "byte-identical reruns from config", identical && files == 6,
       fmt("exit codes %d/%d, %d files compared byte-for-byte, %.1fs", rc1, rc2, files,
           timer.seconds()));
}

}  // namespace

int main() {
  Timer total;
  std::printf("sgdlab acceptance suite\n");
  criterion_1();
  criterion_2();
  const RateRun welsch_run = criterion_3();
  const RateRun pl_run = criterion_4();
  criterion_5();
  criterion_6(welsch_run, pl_run);
  criterion_7();
  criterion_8();
  criterion_9();
  std::printf("%d/9 criteria passed in %.1fs\n", 9 - g_failures, total.seconds());
  return g_failures;
}
