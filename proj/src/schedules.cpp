#include "sgdlab/schedules.hpp"

#include <cmath>
#include <stdexcept>

namespace sgdlab {

std::string to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::polynomial: return "polynomial";
    case ScheduleKind::log_corrected: return "log_corrected";
    case ScheduleKind::pl_matched: return "pl_matched";
    case ScheduleKind::constant: return "constant";
  }
  return "?";
}

double Schedule::eta(std::int64_t t) const {
  if (t < 1) throw std::invalid_argument("Schedule::eta: t must be >= 1");
  const double td = static_cast<double>(t);
  switch (kind_) {
    case ScheduleKind::polynomial:
      return eta1_ * std::pow(td, -theta_);
    case ScheduleKind::log_corrected:
      return eta1_ * std::pow(td * std::pow(std::log(td + 1.0), beta_), -1.0 / (1.0 + alpha_));
    case ScheduleKind::pl_matched:
      return 2.0 / ((td + 1.0) * mu_);
    case ScheduleKind::constant:
      return eta_const_;
  }
  return 0.0;
}

std::vector<std::pair<std::string, double>> Schedule::params() const {
  switch (kind_) {
    case ScheduleKind::polynomial:
      return {{"eta1", eta1_}, {"theta", theta_}, {"alpha", alpha_}};
    case ScheduleKind::log_corrected:
      return {{"eta1", eta1_}, {"beta", beta_}, {"alpha", alpha_}};
    case ScheduleKind::pl_matched:
      return {{"mu", mu_}};
    case ScheduleKind::constant:
      return {{"eta", eta_const_}};
  }
  return {};
}

Schedule poly_schedule(double eta1, double theta, double alpha) {
  if (eta1 <= 0) throw std::invalid_argument("poly_schedule: eta1 must be > 0");
  if (theta <= 0 || theta >= 1) throw std::invalid_argument("poly_schedule: theta must be in (0,1)");
  if (alpha <= 0 || alpha > 1) throw std::invalid_argument("poly_schedule: alpha must be in (0,1]");
  Schedule s;
  s.kind_ = ScheduleKind::polynomial;
  s.eta1_ = eta1;
  s.theta_ = theta;
  s.alpha_ = alpha;
  s.flags_.sum_eta_divergent = theta <= 1.0;
  s.flags_.sum_eta_power_convergent = theta * (1.0 + alpha) > 1.0;
  if (theta <= 1.0 / (1.0 + alpha)) {
    s.theorem_valid_ = false;
    s.validity_note_ = "theta <= 1/(1+alpha): step-size power sums diverge";
  }
  return s;
}

Schedule log_schedule(double eta1, double beta, double alpha) {
  if (eta1 <= 0) throw std::invalid_argument("log_schedule: eta1 must be > 0");
  if (alpha <= 0 || alpha > 1) throw std::invalid_argument("log_schedule: alpha must be in (0,1]");
  Schedule s;
  s.kind_ = ScheduleKind::log_corrected;
  s.eta1_ = eta1;
  s.beta_ = beta;
  s.alpha_ = alpha;
  s.flags_.sum_eta_divergent = true;
  s.flags_.sum_eta_power_convergent = beta > 1.0;
  if (beta <= 1.0) {
    s.theorem_valid_ = false;
    s.validity_note_ = "beta <= 1: log correction too weak for summability";
  }
  return s;
}

std::pair<Schedule, PLScheduleCert> pl_schedule(double mu, const SmoothnessSpec& smoothness) {
  if (mu <= 0) throw std::invalid_argument("pl_schedule: mu must be > 0");
  Schedule s;
  s.kind_ = ScheduleKind::pl_matched;
  s.mu_ = mu;
  s.alpha_ = smoothness.alpha;
  s.flags_.sum_eta_divergent = true;        // harmonic tail
  s.flags_.sum_eta_power_convergent = true; // exponent 1+alpha > 1
  PLScheduleCert cert;
  cert.mu = mu;
  cert.t0 = 2.0 * std::pow(smoothness.L, 2.0 / smoothness.alpha) *
            std::pow(mu, -(1.0 + smoothness.alpha) / smoothness.alpha);
  return {s, cert};
}

Schedule const_schedule(double eta, const PLSpec& pl, const SmoothnessSpec& smoothness) {
  if (eta <= 0) throw std::invalid_argument("const_schedule: eta must be > 0");
  Schedule s;
  s.kind_ = ScheduleKind::constant;
  s.eta_const_ = eta;
  s.alpha_ = smoothness.alpha;
  s.flags_.sum_eta_divergent = true;
  s.flags_.sum_eta_power_convergent = false;
  const double limit = pl.mu / (smoothness.L * smoothness.L);
  if (smoothness.alpha != 1.0) {
    s.theorem_valid_ = false;
    s.validity_note_ = "constant steps need alpha = 1";
  } else if (eta > limit) {
    s.theorem_valid_ = false;
    s.validity_note_ = "eta exceeds mu/L^2";
  }
  return s;
}

SummabilityReport summability_report(const Schedule& s, double alpha, std::int64_t T) {
  if (T < 1) throw std::invalid_argument("summability_report: T must be >= 1");
  SummabilityReport rep;
  rep.flags = s.flags();
  for (std::int64_t t = 1; t <= T; ++t) {
    const double e = s.eta(t);
    rep.partial_sum_eta += e;
    rep.partial_sum_eta_power += std::pow(e, 1.0 + alpha);
  }
  return rep;
}

}  // namespace sgdlab
