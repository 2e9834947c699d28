#include "sgdlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgdlab {

std::string to_string(Kernel::Kind k) {
  return k == Kernel::Kind::linear ? "linear" : "gaussian";
}

double Kernel::operator()(const Vec& a, const Vec& b) const {
  if (a.size() != b.size()) {
    throw std::invalid_argument("Kernel: input dimensions differ (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  }
  switch (kind) {
    case Kind::linear:
      return a.dot(b);
    case Kind::gaussian: {
      if (!(sigma > 0)) throw std::invalid_argument("Kernel: gaussian sigma must be > 0");
      return std::exp(-(a - b).squaredNorm() / (2.0 * sigma * sigma));
    }
  }
  return 0.0;
}

double median_heuristic_sigma(const Dataset& data) {
  const int n = data.n();
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      dists.push_back((data.X().row(i) - data.X().row(j)).norm());
    }
  }
  if (dists.empty()) return 1.0;
  const auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
  std::nth_element(dists.begin(), mid, dists.end());
  const double med = *mid;
  return med > 0 ? med : 1.0;
}

double predict(const RepresenterState& state, const Vec& x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < state.centers.size(); ++i) {
    acc += state.coeffs[i] * state.kernel(state.centers[i], x);
  }
  return acc;
}

void kernel_sgd_step(RepresenterState& state, const Sample& z, double eta,
                     const LossFamilyParams& loss) {
  if (!(eta > 0)) throw std::invalid_argument("kernel_sgd_step: eta must be > 0");
  const double u = predict(state, z.x);
  state.centers.push_back(z.x);
  state.coeffs.push_back(-eta * loss_deriv(loss, u, z.y));
}

namespace {

double grad_norm_sq_from_preds(const Vec& preds, const Dataset& data,
                               const LossFamilyParams& loss, const Mat& gram) {
  const int n = data.n();
  Vec g(n);
  for (int i = 0; i < n; ++i) g(i) = loss_deriv(loss, preds(i), data.y()(i));
  const double val = g.dot(gram * g) / (static_cast<double>(n) * n);
  return std::max(val, 0.0);
}

Mat gram_matrix(const Kernel& kernel, const Dataset& data) {
  const int n = data.n();
  Mat gram(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double v = kernel(data.X().row(i).transpose(), data.X().row(j).transpose());
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  return gram;
}

}  // namespace

double rkhs_grad_norm_sq(const RepresenterState& state, const Dataset& data,
                         const LossFamilyParams& loss) {
  const int n = data.n();
  Vec preds(n);
  for (int i = 0; i < n; ++i) preds(i) = predict(state, data.X().row(i).transpose());
  return grad_norm_sq_from_preds(preds, data, loss, gram_matrix(state.kernel, data));
}

double rkhs_norm_sq(const RepresenterState& state) {
  const auto m = state.centers.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    acc += state.coeffs[i] * state.coeffs[i] * state.kernel(state.centers[i], state.centers[i]);
    for (std::size_t j = i + 1; j < m; ++j) {
      acc += 2.0 * state.coeffs[i] * state.coeffs[j] *
             state.kernel(state.centers[i], state.centers[j]);
    }
  }
  return std::max(acc, 0.0);
}

Trace run_kernel_sgd(const Dataset& data, const LossFamilyParams& loss,
                     const Kernel& kernel, const Schedule& sched, const RunConfig& cfg) {
  const auto grid = checkpoint_grid(cfg);
  const int n = data.n();
  const Mat gram = gram_matrix(kernel, data);

  Trace trace;
  trace.seed = cfg.seed;
  trace.checkpoints.reserve(grid.size());

  Pcg32 rng = make_stream(cfg.seed, StreamId::run);
  Vec preds = Vec::Zero(n);  // w_1 = 0 predicts 0 everywhere
  std::vector<double> coeffs;
  double guard = std::numeric_limits<double>::infinity();
  std::size_t next_ckpt = 0;

  for (std::int64_t t = 1; t <= cfg.T; ++t) {
    const double eta = sched.eta(t);
    if (next_ckpt < grid.size() && grid[next_ckpt] == t) {
      ++next_ckpt;
      double risk = 0.0;
      for (int i = 0; i < n; ++i) risk += loss_value(loss, preds(i), data.y()(i));
      risk /= n;
      trace.checkpoints.push_back({t, risk, grad_norm_sq_from_preds(preds, data, loss, gram), eta});
      if (t == 1) guard = cfg.divergence_factor * std::max(risk, 1.0);
      if (!std::isfinite(risk) || risk > guard) {
        trace.diverged = true;
        break;
      }
    }

    const int i = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(n)));
    const double coeff = -eta * loss_deriv(loss, preds(i), data.y()(i));
    coeffs.push_back(coeff);
    preds += coeff * gram.col(i);

    if (!std::isfinite(preds.squaredNorm())) {
      trace.diverged = true;
      break;
    }
  }

  trace.final_iterate = Eigen::Map<const Vec>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  return trace;
}

Objective make_kernel_squared(const Dataset& data, const Kernel& kernel) {
  return make_kernel_objective(data, gram_matrix(kernel, data));
}

}  // namespace sgdlab
