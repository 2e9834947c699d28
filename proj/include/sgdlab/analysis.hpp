#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgdlab/core.hpp"
#include "sgdlab/objectives.hpp"
#include "sgdlab/schedules.hpp"

namespace sgdlab {

/// Default seed for property-test probes; probes are drawn uniformly from
/// the ball of radius 10 unless a check says otherwise.
inline constexpr std::uint64_t kDefaultProbeSeed = 2718281828u;

struct ViolationReport {
  std::int64_t n_probes = 0;
  std::int64_t n_violations = 0;
  double worst_ratio = 0.0;  // max lhs/rhs over probes with rhs > 0
  std::string worst_probe;
};

/// Samples pairs (w, w~) from the radius ball and z from the dataset, and
/// counts probes where ||grad f(w,z) - grad f(w~,z)|| exceeds
/// (1+tol) * L ||w - w~||^alpha under the objective's certificate.
ViolationReport check_holder(const Objective& obj, std::int64_t n_pairs, double radius,
                             double tol, std::uint64_t seed = kDefaultProbeSeed);

/// Descent inequality phi(w~) <= phi(w) + <w~-w, grad phi(w)>
/// + L/(1+alpha) ||w-w~||^(1+alpha), probed for each sampled per-sample
/// loss and for the population objective.
ViolationReport check_smooth_a(const Objective& obj, std::int64_t n_pairs, double radius,
                               double tol, std::uint64_t seed = kDefaultProbeSeed);

/// Self-bounding inequality for nonnegative losses:
/// ||grad f(w,z)||^((1+alpha)/alpha) <= ((1+alpha) L^(1/alpha) / alpha) f(w,z).
ViolationReport check_self_bounding(const Objective& obj, std::int64_t n_probes, double radius,
                                    double tol, std::uint64_t seed = kDefaultProbeSeed);

/// mu_hat = min over probes with positive suboptimality of
/// ||grad E(w)||^2 / (2 (E(w) - E*)). A valid certificate needs mu <= mu_hat.
/// Uses the objective's certified optimum value; throws when no probe has
/// suboptimality above 1e-10.
double estimate_pl(const Objective& obj, std::int64_t n_probes, double radius,
                   std::uint64_t seed = kDefaultProbeSeed);

/// Central differences per coordinate with step h = h_rel * (1 + ||w||).
Vec finite_diff_grad(const std::function<double(const Vec&)>& fn, const Vec& w, double h_rel);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

/// Least-squares line on (ln t, ln value) over points with t in
/// [t_min, t_max]. Throws on fewer than 4 points, nonpositive values, or
/// zero abscissa variance.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points,
                 double t_min, double t_max);

/// Least-squares line on (t, ln value): the per-step log decay rate used
/// for geometric-convergence checks.
RateFit fit_semilog(const std::vector<std::pair<double, double>>& points,
                    double t_min, double t_max);

struct BoundRatioReport {
  double max_ratio = 0.0;
  double median_ratio = 0.0;
  std::vector<std::pair<std::int64_t, double>> ratios;  // (t, ratio)
};

/// ratio(T) = min_prefix(T) * sum_{t<=T} eta_t at each checkpoint in the
/// window. The gradient bound holds with some constant iff the ratios stay
/// bounded, so boundedness (max vs median) is what gets reported.
BoundRatioReport bound_ratio_check(const AggregateTrace& agg, const Schedule& sched,
                                   double t_min, double t_max);
/// Same, using the eta sums already stored in the aggregate.
BoundRatioReport bound_ratio_check(const AggregateTrace& agg, double t_min, double t_max);

struct ConvergenceCheck {
  int n_pass = 0;
  int n_fail = 0;
  std::vector<double> per_seed_oscillation;  // infinity for diverged seeds
};

/// Per seed, the oscillation (max - min) of recorded risk over the tail
/// window [tail_fraction * T, T]; a seed passes when the oscillation is at
/// most eps (and, when grad_norm_eps is given, its final recorded
/// ||grad E||^2 is at most grad_norm_eps). Diverged seeds fail. Throws if
/// a non-diverged trace has fewer than 2 tail checkpoints.
ConvergenceCheck as_convergence_check(const std::vector<Trace>& traces, double tail_fraction,
                                      double eps, std::optional<double> grad_norm_eps = {});

}  // namespace sgdlab
