#include "sgdlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sgdlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ViolationTracker {
  ViolationReport report;
  double tol = 0.0;

  // Relative semantics: a probe violates when lhs > (1+tol) * rhs.
  void observe(double lhs, double rhs, const std::string& desc) {
    ++report.n_probes;
    const bool violated = lhs > (1.0 + tol) * rhs;
    if (violated) ++report.n_violations;
    double ratio = 0.0;
    if (rhs > 0) {
      ratio = lhs / rhs;
    } else if (lhs > 0) {
      ratio = kInf;
    } else {
      ratio = 1.0;  // 0 <= 0, degenerate probe
    }
    if (ratio > report.worst_ratio) {
      report.worst_ratio = ratio;
      report.worst_probe = desc;
    }
  }
};

std::string describe_pair(std::int64_t k, int i, double sep, double lhs, double rhs) {
  std::ostringstream os;
  os << "probe " << k << ", sample " << i << ", |w-w~|=" << sep
     << ", lhs=" << lhs << ", rhs=" << rhs;
  return os.str();
}

}  // namespace

ViolationReport check_holder(const Objective& obj, std::int64_t n_pairs, double radius,
                             double tol, std::uint64_t seed) {
  if (n_pairs < 1) throw std::invalid_argument("check_holder: n_pairs must be >= 1");
  Pcg32 rng = make_stream(seed, StreamId::probe);
  const auto& spec = obj.smoothness();
  ViolationTracker tracker;
  tracker.tol = tol;
  for (std::int64_t k = 0; k < n_pairs; ++k) {
    const Vec w = sample_in_ball(rng, obj.dim(), radius);
    const Vec wt = sample_in_ball(rng, obj.dim(), radius);
    const int i = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(obj.n_samples())));
    const double lhs = (obj.sample_grad(w, i) - obj.sample_grad(wt, i)).norm();
    const double sep = (w - wt).norm();
    const double rhs = spec.L * std::pow(sep, spec.alpha);
    tracker.observe(lhs, rhs, describe_pair(k, i, sep, lhs, rhs));
  }
  return tracker.report;
}

ViolationReport check_smooth_a(const Objective& obj, std::int64_t n_pairs, double radius,
                               double tol, std::uint64_t seed) {
  if (n_pairs < 1) throw std::invalid_argument("check_smooth_a: n_pairs must be >= 1");
  Pcg32 rng = make_stream(seed, StreamId::probe);
  const auto& spec = obj.smoothness();
  const double curv = spec.L / (1.0 + spec.alpha);
  ViolationTracker tracker;
  tracker.tol = tol;
  for (std::int64_t k = 0; k < n_pairs; ++k) {
    const Vec w = sample_in_ball(rng, obj.dim(), radius);
    const Vec wt = sample_in_ball(rng, obj.dim(), radius);
    const int i = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(obj.n_samples())));
    const double sep = (w - wt).norm();
    const double gap = curv * std::pow(sep, 1.0 + spec.alpha);

    // per-sample loss as phi
    {
      const double lhs = obj.sample_loss(wt, i);
      const double rhs = obj.sample_loss(w, i) + (wt - w).dot(obj.sample_grad(w, i)) + gap;
      tracker.observe(lhs, rhs, "sample-loss " + describe_pair(k, i, sep, lhs, rhs));
    }
    // population objective as phi (it inherits the same certificate)
    {
      const double lhs = obj.value(wt);
      const double rhs = obj.value(w) + (wt - w).dot(obj.grad(w)) + gap;
      tracker.observe(lhs, rhs, "population " + describe_pair(k, i, sep, lhs, rhs));
    }
  }
  return tracker.report;
}

ViolationReport check_self_bounding(const Objective& obj, std::int64_t n_probes, double radius,
                                    double tol, std::uint64_t seed) {
  if (n_probes < 1) throw std::invalid_argument("check_self_bounding: n_probes must be >= 1");
  Pcg32 rng = make_stream(seed, StreamId::probe);
  const auto& spec = obj.smoothness();
  const double factor = (1.0 + spec.alpha) * std::pow(spec.L, 1.0 / spec.alpha) / spec.alpha;
  ViolationTracker tracker;
  tracker.tol = tol;
  for (std::int64_t k = 0; k < n_probes; ++k) {
    const Vec w = sample_in_ball(rng, obj.dim(), radius);
    const int i = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(obj.n_samples())));
    const double grad_norm = obj.sample_grad(w, i).norm();
    const double lhs = std::pow(grad_norm, (1.0 + spec.alpha) / spec.alpha);
    const double rhs = factor * obj.sample_loss(w, i);
    tracker.observe(lhs, rhs, describe_pair(k, i, 0.0, lhs, rhs));
  }
  return tracker.report;
}

double estimate_pl(const Objective& obj, std::int64_t n_probes, double radius,
                   std::uint64_t seed) {
  if (n_probes < 1) throw std::invalid_argument("estimate_pl: n_probes must be >= 1");
  Pcg32 rng = make_stream(seed, StreamId::probe);

  std::vector<Vec> probes;
  probes.reserve(n_probes);
  for (std::int64_t k = 0; k < n_probes; ++k) {
    probes.push_back(sample_in_ball(rng, obj.dim(), radius));
  }

  double opt = kInf;
  if (obj.pl()) {
    opt = obj.pl()->optimum_value;
  } else {
    for (const Vec& w : probes) opt = std::min(opt, obj.value(w));
  }

  double mu_hat = kInf;
  for (const Vec& w : probes) {
    const double sub = obj.value(w) - opt;
    if (sub <= 1e-10) continue;  // avoid 0/0 near the optimum
    mu_hat = std::min(mu_hat, obj.grad(w).squaredNorm() / (2.0 * sub));
  }
  if (!std::isfinite(mu_hat)) {
    throw std::runtime_error("estimate_pl: no probe with positive suboptimality");
  }
  return mu_hat;
}

Vec finite_diff_grad(const std::function<double(const Vec&)>& fn, const Vec& w, double h_rel) {
  if (!(h_rel > 0)) throw std::invalid_argument("finite_diff_grad: h_rel must be > 0");
  const double h = h_rel * (1.0 + w.norm());
  Vec g(w.size());
  Vec probe = w;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    probe(k) = w(k) + h;
    const double up = fn(probe);
    probe(k) = w(k) - h;
    const double down = fn(probe);
    probe(k) = w(k);
    g(k) = (up - down) / (2.0 * h);
  }
  return g;
}

namespace {

RateFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys,
                 double window_lo, double window_hi) {
  const auto n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (!(sxx > 0)) throw std::invalid_argument("rate fit: zero abscissa variance");

  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.window_lo = window_lo;
  fit.window_hi = window_hi;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double pred = fit.intercept + fit.slope * xs[k];
    ss_res += (ys[k] - pred) * (ys[k] - pred);
    ss_tot += (ys[k] - my) * (ys[k] - my);
  }
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

RateFit fit_impl(const std::vector<std::pair<double, double>>& points,
                 double t_min, double t_max, bool log_abscissa) {
  std::vector<double> xs, ys;
  for (const auto& [t, v] : points) {
    if (t < t_min || t > t_max) continue;
    if (!(v > 0)) throw std::invalid_argument("rate fit: nonpositive value in window");
    xs.push_back(log_abscissa ? std::log(t) : t);
    ys.push_back(std::log(v));
  }
  if (xs.size() < 4) {
    throw std::invalid_argument("rate fit: need at least 4 points in window, have " +
                                std::to_string(xs.size()));
  }
  return fit_line(xs, ys, t_min, t_max);
}

}  // namespace

RateFit fit_rate(const std::vector<std::pair<double, double>>& points,
                 double t_min, double t_max) {
  return fit_impl(points, t_min, t_max, /*log_abscissa=*/true);
}

RateFit fit_semilog(const std::vector<std::pair<double, double>>& points,
                    double t_min, double t_max) {
  return fit_impl(points, t_min, t_max, /*log_abscissa=*/false);
}

namespace {

BoundRatioReport ratio_report(std::vector<std::pair<std::int64_t, double>> ratios) {
  if (ratios.empty()) throw std::invalid_argument("bound_ratio_check: empty window");
  BoundRatioReport rep;
  std::vector<double> vals;
  vals.reserve(ratios.size());
  for (const auto& [t, r] : ratios) vals.push_back(r);
  rep.max_ratio = *std::max_element(vals.begin(), vals.end());
  std::sort(vals.begin(), vals.end());
  const std::size_t m = vals.size();
  rep.median_ratio = (m % 2 == 1) ? vals[m / 2] : 0.5 * (vals[m / 2 - 1] + vals[m / 2]);
  rep.ratios = std::move(ratios);
  return rep;
}

}  // namespace

BoundRatioReport bound_ratio_check(const AggregateTrace& agg, const Schedule& sched,
                                   double t_min, double t_max) {
  std::vector<std::pair<std::int64_t, double>> ratios;
  double eta_sum = 0.0;
  std::int64_t summed_to = 0;
  for (const auto& pt : agg.checkpoints) {
    if (pt.t < t_min || pt.t > t_max) continue;
    while (summed_to < pt.t) eta_sum += sched.eta(++summed_to);
    ratios.emplace_back(pt.t, pt.min_prefix_grad_norm_sq * eta_sum);
  }
  return ratio_report(std::move(ratios));
}

BoundRatioReport bound_ratio_check(const AggregateTrace& agg, double t_min, double t_max) {
  std::vector<std::pair<std::int64_t, double>> ratios;
  for (const auto& pt : agg.checkpoints) {
    if (pt.t < t_min || pt.t > t_max) continue;
    ratios.emplace_back(pt.t, pt.min_prefix_grad_norm_sq * pt.eta_sum);
  }
  return ratio_report(std::move(ratios));
}

ConvergenceCheck as_convergence_check(const std::vector<Trace>& traces, double tail_fraction,
                                      double eps, std::optional<double> grad_norm_eps) {
  if (tail_fraction <= 0 || tail_fraction >= 1) {
    throw std::invalid_argument("as_convergence_check: tail_fraction must be in (0,1)");
  }
  ConvergenceCheck check;
  for (const Trace& tr : traces) {
    if (tr.diverged || tr.checkpoints.empty()) {
      ++check.n_fail;
      check.per_seed_oscillation.push_back(kInf);
      continue;
    }
    const double horizon = static_cast<double>(tr.checkpoints.back().t);
    const double tail_lo = tail_fraction * horizon;
    double lo = kInf, hi = -kInf;
    int count = 0;
    for (const auto& cp : tr.checkpoints) {
      if (static_cast<double>(cp.t) < tail_lo) continue;
      lo = std::min(lo, cp.risk);
      hi = std::max(hi, cp.risk);
      ++count;
    }
    if (count < 2) {
      throw std::invalid_argument("as_convergence_check: tail window has fewer than 2 checkpoints");
    }
    const double osc = hi - lo;
    check.per_seed_oscillation.push_back(osc);
    bool pass = osc <= eps;
    if (grad_norm_eps && tr.checkpoints.back().grad_norm_sq > *grad_norm_eps) pass = false;
    if (pass) {
      ++check.n_pass;
    } else {
      ++check.n_fail;
    }
  }
  return check;
}

}  // namespace sgdlab
