#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgdlab/rng.hpp"

namespace sgdlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Sample {
  Vec x;
  double y = 0.0;
};

/// A finite dataset acting as the sampling measure: uniform with
/// replacement over its n rows. Immutable after construction.
class Dataset {
 public:
  /// X is n-by-d (one sample per row). Throws std::invalid_argument on
  /// empty data, dimension mismatch, or non-finite entries.
  Dataset(Mat X, Vec y);

  int n() const { return static_cast<int>(X_.rows()); }
  int d() const { return static_cast<int>(X_.cols()); }
  const Mat& X() const { return X_; }
  const Vec& y() const { return y_; }
  Sample sample(int i) const { return Sample{X_.row(i).transpose(), y_(i)}; }

 private:
  Mat X_;
  Vec y_;
};

Dataset load_dataset_csv(const std::string& path);
void save_dataset_csv(const std::string& path, const Dataset& data);

enum class InputLaw { gaussian, sphere };

struct SyntheticDataset {
  Dataset data;
  Vec planted_model;
};

/// Planted-model regression data: inputs have i.i.d. standard normal
/// entries (the sphere law then rescales each row to norm sqrt(d)),
/// the planted model has N(0, I/d) entries, and targets are
/// y_i = <w_planted, x_i> + noise_sigma * xi_i. Draw order is row-major
/// inputs, then the planted model, then the noise, all from the seed's
/// dataset stream.
SyntheticDataset synthetic_regression(int n, int d, std::uint64_t seed,
                                      double noise_sigma,
                                      InputLaw law = InputLaw::gaussian);

enum class Provenance { analytic, numeric_estimate };

std::string to_string(Provenance p);

/// Certificate that per-sample gradients are alpha-Holder with constant L.
struct SmoothnessSpec {
  double alpha = 1.0;  // in (0, 1]
  double L = 1.0;      // > 0
  Provenance provenance = Provenance::analytic;
};

/// Gradient-domination certificate: suboptimality is bounded by
/// ||grad||^2 / (2 mu), with the optimum value (and point, when known).
struct PLSpec {
  double mu = 0.0;
  double optimum_value = 0.0;
  std::optional<Vec> optimum_point;
  Provenance provenance = Provenance::numeric_estimate;
};

/// The all-zeros start iterate. Throws std::invalid_argument for d < 1.
Vec zero_param(int d);

struct Checkpoint {
  std::int64_t t = 0;
  double risk = 0.0;
  double grad_norm_sq = 0.0;
  double eta = 0.0;
};

/// Per-step quantities recorded only in diagnostic mode (short runs).
struct StepDiag {
  std::int64_t t = 0;
  double risk_before = 0.0;
  double risk_after = 0.0;
  double inner = 0.0;    // <step gradient, population gradient>
  double grad_sq = 0.0;  // ||step gradient||^2
  double eta = 0.0;
};

struct Trace {
  std::uint64_t seed = 0;
  std::vector<Checkpoint> checkpoints;  // strictly increasing t, first at t=1
  bool diverged = false;
  Vec final_iterate;
  std::vector<StepDiag> step_diags;
};

struct AggregatePoint {
  std::int64_t t = 0;
  double mean_risk = 0.0;
  double mean_grad_norm_sq = 0.0;
  double min_prefix_grad_norm_sq = 0.0;
  double eta_sum = 0.0;  // sum of eta_s for s <= t
};

/// Cross-seed aggregate at shared checkpoints; means are over the
/// non-diverged seeds, min_prefix is the running minimum of the mean.
struct AggregateTrace {
  std::vector<AggregatePoint> checkpoints;
  int n_seeds = 0;
  std::vector<std::uint64_t> diverged_seeds;
};

Vec gaussian_vec(Pcg32& rng, int d);

/// Uniform draw from the closed ball of the given radius.
Vec sample_in_ball(Pcg32& rng, int d, double radius);

}  // namespace sgdlab
