#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sgdlab/core.hpp"

namespace sgdlab {

enum class ScheduleKind { polynomial, log_corrected, pl_matched, constant };

std::string to_string(ScheduleKind k);

struct SummabilityFlags {
  bool sum_eta_divergent = false;        // sum eta_t = infinity
  bool sum_eta_power_convergent = false; // sum eta_t^(1+alpha) < infinity
};

/// A step-size rule t -> eta_t. Pure and immutable: evaluation has no
/// state, so schedules are trivially shareable across threads.
class Schedule {
 public:
  double eta(std::int64_t t) const;

  ScheduleKind kind() const { return kind_; }
  const SummabilityFlags& flags() const { return flags_; }

  /// False when the parameters fall outside the range the convergence
  /// statements cover. Invalid schedules still evaluate; the harness runs
  /// them deliberately to demonstrate failure modes.
  bool theorem_valid() const { return theorem_valid_; }
  const std::string& validity_note() const { return validity_note_; }

  /// Named numeric parameters, for config echo and metadata.
  std::vector<std::pair<std::string, double>> params() const;

 private:
  friend Schedule poly_schedule(double, double, double);
  friend Schedule log_schedule(double, double, double);
  friend std::pair<Schedule, struct PLScheduleCert> pl_schedule(double, const SmoothnessSpec&);
  friend Schedule const_schedule(double, const PLSpec&, const SmoothnessSpec&);

  ScheduleKind kind_ = ScheduleKind::constant;
  double eta1_ = 1.0;
  double theta_ = 0.0;
  double beta_ = 0.0;
  double alpha_ = 1.0;
  double mu_ = 0.0;
  double eta_const_ = 0.0;
  SummabilityFlags flags_;
  bool theorem_valid_ = true;
  std::string validity_note_;
};

/// Validity threshold for the reciprocal schedule: for t >= t0 the
/// per-step contraction condition L^2 eta_t^(1+alpha) <= mu eta_t holds.
struct PLScheduleCert {
  double mu = 0.0;
  double t0 = 0.0;  // 2 L^(2/alpha) mu^(-(1+alpha)/alpha)
};

/// eta_t = eta1 * t^-theta. Requires eta1 > 0 and theta in (0,1); flags
/// theorem-invalid (not an error) when theta <= 1/(1+alpha).
Schedule poly_schedule(double eta1, double theta, double alpha);

/// eta_t = eta1 * (t * ln(t+1)^beta)^(-1/(1+alpha)), natural log.
/// Requires eta1 > 0; beta <= 1 is flagged theorem-invalid.
Schedule log_schedule(double eta1, double beta, double alpha);

/// eta_t = 2 / ((t+1) mu), with its contraction threshold t0.
std::pair<Schedule, PLScheduleCert> pl_schedule(double mu, const SmoothnessSpec& smoothness);

/// eta_t = eta. Theorem-valid iff eta <= mu/L^2 (inclusive) and alpha = 1.
Schedule const_schedule(double eta, const PLSpec& pl, const SmoothnessSpec& smoothness);

struct SummabilityReport {
  double partial_sum_eta = 0.0;
  double partial_sum_eta_power = 0.0;  // sum of eta_t^(1+alpha)
  SummabilityFlags flags;
};

SummabilityReport summability_report(const Schedule& s, double alpha, std::int64_t T);

}  // namespace sgdlab
