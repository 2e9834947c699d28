#include "sgdlab/objectives.hpp"

#include <cmath>
#include <stdexcept>

namespace sgdlab {

std::string to_string(LossFamily f) {
  switch (f) {
    case LossFamily::least_squares: return "least_squares";
    case LossFamily::welsch: return "welsch";
    case LossFamily::holder_p: return "holder_p";
    case LossFamily::kernel_squared: return "kernel_squared";
  }
  return "?";
}

namespace {

double sign(double u) { return (u > 0) - (u < 0); }

}  // namespace

double loss_value(const LossFamilyParams& p, double prediction, double target) {
  const double u = prediction - target;
  switch (p.family) {
    case LossFamily::least_squares:
    case LossFamily::kernel_squared:
      return 0.5 * u * u;
    case LossFamily::welsch:
      // -expm1 keeps tiny residuals accurate; plain 1-exp rounds to 0
      return -std::expm1(-u * u / (2.0 * p.c * p.c));
    case LossFamily::holder_p:
      return std::pow(std::abs(u), 1.0 + p.alpha_loss) / (1.0 + p.alpha_loss);
  }
  return 0.0;
}

double loss_deriv(const LossFamilyParams& p, double prediction, double target) {
  const double u = prediction - target;
  switch (p.family) {
    case LossFamily::least_squares:
    case LossFamily::kernel_squared:
      return u;
    case LossFamily::welsch: {
      const double c2 = p.c * p.c;
      return (u / c2) * std::exp(-u * u / (2.0 * c2));
    }
    case LossFamily::holder_p:
      if (u == 0.0) return 0.0;
      return std::pow(std::abs(u), p.alpha_loss) * sign(u);
  }
  return 0.0;
}

Objective::Objective(Dataset data, Mat design, Vec targets, LossFamilyParams loss,
                     SmoothnessSpec smoothness)
    : data_(std::move(data)),
      design_(std::move(design)),
      targets_(std::move(targets)),
      loss_(loss),
      smoothness_(smoothness) {}

void Objective::check_dim(const Vec& w) const {
  if (w.size() != design_.cols()) {
    throw std::invalid_argument("Objective: parameter has dimension " +
                                std::to_string(w.size()) + ", expected " +
                                std::to_string(design_.cols()));
  }
}

double Objective::predict(const Vec& w, int i) const { return design_.row(i).dot(w); }

double Objective::sample_loss(const Vec& w, int i) const {
  check_dim(w);
  return loss_value(loss_, predict(w, i), targets_(i));
}

Vec Objective::sample_grad(const Vec& w, int i) const {
  check_dim(w);
  const double s = loss_deriv(loss_, predict(w, i), targets_(i));
  return s * design_.row(i).transpose();
}

double Objective::value(const Vec& w) const {
  check_dim(w);
  const Vec u = design_ * w - targets_;
  const int n = n_samples();
  double acc = 0.0;
  switch (loss_.family) {
    case LossFamily::least_squares:
    case LossFamily::kernel_squared:
      return 0.5 * u.squaredNorm() / n;
    case LossFamily::welsch: {
      const double c2 = loss_.c * loss_.c;
      for (int i = 0; i < n; ++i) acc += -std::expm1(-u(i) * u(i) / (2.0 * c2));
      return acc / n;
    }
    case LossFamily::holder_p: {
      const double p = 1.0 + loss_.alpha_loss;
      for (int i = 0; i < n; ++i) acc += std::pow(std::abs(u(i)), p);
      return acc / (p * n);
    }
  }
  return acc;
}

Vec Objective::grad(const Vec& w) const {
  check_dim(w);
  const Vec u = design_ * w - targets_;
  const int n = n_samples();
  Vec s(n);
  for (int i = 0; i < n; ++i) s(i) = loss_deriv(loss_, u(i) + targets_(i), targets_(i));
  return design_.transpose() * s / n;
}

Objective Objective::with_smoothness(const SmoothnessSpec& s) const {
  Objective copy = *this;
  copy.smoothness_ = s;
  return copy;
}

namespace {

struct LsCerts {
  PLSpec pl;
  bool zero_variance = false;
};

// Second-moment eigendecomposition: mu is the smallest nonzero eigenvalue,
// the optimum is the least-norm solution of the normal equations. Valid in
// rank-deficient designs because minimizers differ only along the null
// space, where neither side of the PL inequality changes.
LsCerts least_squares_certs(const Mat& design, const Vec& targets) {
  const auto n = static_cast<double>(design.rows());
  const Mat second_moment = design.transpose() * design / n;
  Eigen::SelfAdjointEigenSolver<Mat> eig(second_moment);
  if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const Vec& evals = eig.eigenvalues();  // ascending
  const double lmax = evals(evals.size() - 1);
  if (!(lmax > 0)) {
    throw std::invalid_argument("least squares: all-zero design has no PL certificate");
  }
  const double thr = 1e-12 * lmax;

  const Vec b = design.transpose() * targets / n;
  const Vec proj = eig.eigenvectors().transpose() * b;
  double mu = lmax;
  Vec coef = Vec::Zero(evals.size());
  for (Eigen::Index k = 0; k < evals.size(); ++k) {
    if (evals(k) > thr) {
      mu = std::min(mu, evals(k));
      coef(k) = proj(k) / evals(k);
    }
  }
  LsCerts certs;
  certs.pl.mu = mu;
  certs.pl.optimum_point = eig.eigenvectors() * coef;
  certs.pl.provenance = Provenance::numeric_estimate;

  const Vec residual = design * (*certs.pl.optimum_point) - targets;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < residual.size(); ++i) {
    worst = std::max(worst, std::abs(residual(i)) * design.row(i).norm());
  }
  certs.zero_variance = worst <= 1e-8;
  return certs;
}

double max_row_sq_norm(const Mat& design) {
  return design.rowwise().squaredNorm().maxCoeff();
}

}  // namespace

Objective make_least_squares(const Dataset& data) {
  SmoothnessSpec smooth{1.0, max_row_sq_norm(data.X()), Provenance::analytic};
  Objective obj(data, data.X(), data.y(),
                LossFamilyParams{LossFamily::least_squares, 1.0, 1.0}, smooth);
  auto certs = least_squares_certs(obj.design_, obj.targets_);
  certs.pl.optimum_value = obj.value(*certs.pl.optimum_point);
  obj.pl_ = certs.pl;
  obj.zero_variance_ = certs.zero_variance;
  return obj;
}

Objective make_interpolating_least_squares(int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("interpolating least squares: need n, d >= 1");
  auto synth = synthetic_regression(n, d, seed, 0.0, InputLaw::gaussian);
  Objective obj = make_least_squares(synth.data);
  if (!obj.zero_variance_) {
    throw std::runtime_error("interpolating least squares: planted targets not interpolated");
  }
  obj.pl_->optimum_value = 0.0;  // exact: zero residuals at the least-norm solution
  return obj;
}

Objective make_welsch(const Dataset& data, double c) {
  if (c <= 0) throw std::invalid_argument("welsch: scale c must be > 0");
  SmoothnessSpec smooth{1.0, max_row_sq_norm(data.X()) / (c * c), Provenance::analytic};
  return Objective(data, data.X(), data.y(),
                   LossFamilyParams{LossFamily::welsch, c, 1.0}, smooth);
}

namespace {

// Scalar Holder constant of g(u) = |u|^a sign(u). The ratio
// |g(u)-g(v)| / |u-v|^a is scale invariant and peaks at 2^(1-a) on
// antisymmetric pairs; a pair search validates (and would inflate) the
// closed form before it is certified.
double holder_scalar_constant(double a) {
  const double analytic = std::pow(2.0, 1.0 - a);
  Pcg32 rng = make_stream(97, StreamId::probe);
  double found = 0.0;
  auto g = [a](double u) { return u == 0.0 ? 0.0 : std::pow(std::abs(u), a) * sign(u); };
  for (int k = 0; k < 4000; ++k) {
    const double u = 2.0 * rng.next_double() - 1.0;
    const double v = (k % 4 == 0) ? -u : 2.0 * rng.next_double() - 1.0;
    if (u == v) continue;
    found = std::max(found, std::abs(g(u) - g(v)) / std::pow(std::abs(u - v), a));
  }
  return std::max(analytic, found * (1.0 + 1e-12));
}

}  // namespace

Objective make_holder_p(const Dataset& data, double alpha_loss) {
  if (alpha_loss <= 0 || alpha_loss >= 1) {
    throw std::invalid_argument("holder_p: alpha_loss must be in (0,1)");
  }
  const double max_norm = std::sqrt(max_row_sq_norm(data.X()));
  const double L = holder_scalar_constant(alpha_loss) * std::pow(max_norm, 1.0 + alpha_loss);
  SmoothnessSpec smooth{alpha_loss, L, Provenance::numeric_estimate};
  return Objective(data, data.X(), data.y(),
                   LossFamilyParams{LossFamily::holder_p, 1.0, alpha_loss}, smooth);
}

Objective make_kernel_objective(const Dataset& data, Mat design) {
  SmoothnessSpec smooth{1.0, max_row_sq_norm(design), Provenance::analytic};
  Objective obj(data, std::move(design), data.y(),
                LossFamilyParams{LossFamily::kernel_squared, 1.0, 1.0}, smooth);
  auto certs = least_squares_certs(obj.design_, obj.targets_);
  certs.pl.optimum_value = obj.value(*certs.pl.optimum_point);
  obj.pl_ = certs.pl;
  obj.zero_variance_ = certs.zero_variance;
  return obj;
}

double population_value(const Objective& obj, const Vec& w) { return obj.value(w); }
Vec population_grad(const Objective& obj, const Vec& w) { return obj.grad(w); }

}  // namespace sgdlab
