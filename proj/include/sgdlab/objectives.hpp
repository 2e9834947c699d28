#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sgdlab/core.hpp"

namespace sgdlab {

enum class LossFamily { least_squares, welsch, holder_p, kernel_squared };

std::string to_string(LossFamily f);

struct LossFamilyParams {
  LossFamily family = LossFamily::least_squares;
  double c = 1.0;           // welsch scale
  double alpha_loss = 1.0;  // holder exponent, in (0,1)
};

/// Scalar loss psi(u - y) as a function of the model prediction u.
double loss_value(const LossFamilyParams& p, double prediction, double target);
/// d/du of loss_value. The holder family defines the derivative as 0 at
/// a zero residual (the continuous extension).
double loss_deriv(const LossFamilyParams& p, double prediction, double target);

/// A finite-population objective: per-sample losses f(w, z_i) of the
/// composed form psi(<w, row_i> - y_i), together with the exact population
/// value E(w) = (1/n) sum_i f(w, z_i), its exact gradient, and
/// certificates. Immutable; all evaluations are pure.
class Objective {
 public:
  double value(const Vec& w) const;
  Vec grad(const Vec& w) const;

  double sample_loss(const Vec& w, int i) const;
  Vec sample_grad(const Vec& w, int i) const;

  /// <w, row_i>; the scalar hot path used by the engine.
  double predict(const Vec& w, int i) const;
  double target(int i) const { return targets_(i); }

  int dim() const { return static_cast<int>(design_.cols()); }
  int n_samples() const { return static_cast<int>(design_.rows()); }
  const Mat& design() const { return design_; }
  const Dataset& data() const { return data_; }
  const LossFamilyParams& loss() const { return loss_; }
  const SmoothnessSpec& smoothness() const { return smoothness_; }
  const std::optional<PLSpec>& pl() const { return pl_; }
  bool zero_variance_at_optimum() const { return zero_variance_; }

  /// Copy with an overridden certificate (checker sensitivity tests).
  Objective with_smoothness(const SmoothnessSpec& s) const;

 private:
  friend Objective make_least_squares(const Dataset&);
  friend Objective make_interpolating_least_squares(int, int, std::uint64_t);
  friend Objective make_welsch(const Dataset&, double);
  friend Objective make_holder_p(const Dataset&, double);
  friend Objective make_kernel_objective(const Dataset&, Mat design);

  Objective(Dataset data, Mat design, Vec targets, LossFamilyParams loss,
            SmoothnessSpec smoothness);

  void check_dim(const Vec& w) const;

  Dataset data_;
  Mat design_;   // what the linear model sees: X, or the Gram matrix
  Vec targets_;
  LossFamilyParams loss_;
  SmoothnessSpec smoothness_;
  std::optional<PLSpec> pl_;
  bool zero_variance_ = false;
};

/// f(w,z) = (1/2)(<w,x> - y)^2. Certificates: alpha = 1 with
/// L = max_i ||x_i||^2 (analytic); mu is the smallest nonzero eigenvalue
/// of the empirical second-moment matrix with the least-norm optimum, so
/// the PL certificate also covers rank-deficient designs.
Objective make_least_squares(const Dataset& data);

/// Random overparameterized regression with exact interpolation:
/// standard normal inputs, targets from a planted model, no noise. The
/// optimum has zero per-sample gradients (zero variance) and E(w*) = 0.
Objective make_interpolating_least_squares(int n, int d, std::uint64_t seed);

/// f(w,z) = 1 - exp(-u^2/(2c^2)), u = <w,x> - y. Bounded, nonconvex;
/// alpha = 1 with L = max_i ||x_i||^2 / c^2 (analytic, sup|psi''| = 1/c^2).
Objective make_welsch(const Dataset& data, double c);

/// f(w,z) = |u|^(1+a)/(1+a) with a in (0,1): the gradient is a-Holder but
/// not Lipschitz. L = 2^(1-a) max_i ||x_i||^(1+a), validated by a scalar
/// pair search at construction (numeric-estimate provenance).
Objective make_holder_p(const Dataset& data, double alpha_loss);

double population_value(const Objective& obj, const Vec& w);
Vec population_grad(const Objective& obj, const Vec& w);

/// Least squares over an explicit design matrix (kernel-section plumbing;
/// the rows play the role of inputs in every certificate).
Objective make_kernel_objective(const Dataset& data, Mat design);

}  // namespace sgdlab
