#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgdlab/core.hpp"
#include "sgdlab/engine.hpp"
#include "sgdlab/objectives.hpp"

namespace sgdlab {

/// Mercer kernel over input vectors. Both kinds are exactly symmetric.
struct Kernel {
  enum class Kind { linear, gaussian };
  Kind kind = Kind::linear;
  double sigma = 1.0;  // gaussian bandwidth, > 0

  double operator()(const Vec& a, const Vec& b) const;
};

std::string to_string(Kernel::Kind k);

/// Median pairwise distance of the dataset inputs; the parameter-free
/// gaussian bandwidth default. Falls back to 1 when every distance is 0.
double median_heuristic_sigma(const Dataset& data);

/// An RKHS element stored nonparametrically: w = sum_i coeffs[i] K(centers[i], .).
/// The empty state is the zero function (the start iterate).
struct RepresenterState {
  Kernel kernel;
  std::vector<Vec> centers;
  std::vector<double> coeffs;
};

/// w(x) = sum_i coeffs[i] K(centers[i], x).
double predict(const RepresenterState& state, const Vec& x);

/// Functional SGD update: appends center z.x with coefficient
/// -eta * psi'(w(z.x), z.y); prior terms are untouched.
void kernel_sgd_step(RepresenterState& state, const Sample& z, double eta,
                     const LossFamilyParams& loss);

/// ||grad E(w)||^2 in the RKHS: (1/n^2) sum_ij g_i g_j K(x_i, x_j) with
/// g_i = psi'(w(x_i), y_i). Clamped to 0 when rounding makes it tiny
/// negative.
double rkhs_grad_norm_sq(const RepresenterState& state, const Dataset& data,
                         const LossFamilyParams& loss);

/// ||w||^2 = a' G a over the state's own centers; clamped at 0.
double rkhs_norm_sq(const RepresenterState& state);

/// Functional SGD with the same index-stream, checkpoint, and divergence
/// contract as the parametric engine. Predictions at the n data points are
/// cached and updated in O(n) per step, so a checkpoint costs O(n^2) for
/// the Gram double sum only. Trace.final_iterate holds the coefficient
/// vector (one entry per step taken).
Trace run_kernel_sgd(const Dataset& data, const LossFamilyParams& loss,
                     const Kernel& kernel, const Schedule& sched, const RunConfig& cfg);

/// Least squares over the kernel section span: coefficients a in R^n with
/// design rows the Gram rows, f(a, z_i) = (1/2)(<G_i, a> - y_i)^2.
Objective make_kernel_squared(const Dataset& data, const Kernel& kernel);

}  // namespace sgdlab
