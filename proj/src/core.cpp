#include "sgdlab/core.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sgdlab/io.hpp"

namespace sgdlab {

Dataset::Dataset(Mat X, Vec y) : X_(std::move(X)), y_(std::move(y)) {
  if (X_.rows() < 1 || X_.cols() < 1) {
    throw std::invalid_argument("Dataset: need n >= 1 samples of dimension d >= 1");
  }
  if (y_.size() != X_.rows()) {
    throw std::invalid_argument("Dataset: X has " + std::to_string(X_.rows()) +
                                " rows but y has " + std::to_string(y_.size()) + " entries");
  }
  if (!X_.allFinite() || !y_.allFinite()) {
    throw std::invalid_argument("Dataset: non-finite entry");
  }
}

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");

  auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, ',')) fields.push_back(cur);
    return fields;
  };

  const auto header = split(line);
  if (header.size() < 2) throw std::runtime_error(path + ": header needs x_1..x_d,y");
  const int d = static_cast<int>(header.size()) - 1;

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (static_cast<int>(fields.size()) != d + 1) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(d + 1) + " fields, got " +
                               std::to_string(fields.size()));
    }
    std::vector<double> row(d + 1);
    for (int k = 0; k <= d; ++k) {
      try {
        size_t pos = 0;
        row[k] = std::stod(fields[k], &pos);
        if (pos != fields[k].size()) throw std::invalid_argument(fields[k]);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": bad number '" + fields[k] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");

  Mat X(rows.size(), d);
  Vec y(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int k = 0; k < d; ++k) X(static_cast<Eigen::Index>(i), k) = rows[i][k];
    y(static_cast<Eigen::Index>(i)) = rows[i][d];
  }
  return Dataset(std::move(X), std::move(y));
}

void save_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  for (int k = 1; k <= data.d(); ++k) out << "x_" << k << ",";
  out << "y\n";
  for (int i = 0; i < data.n(); ++i) {
    for (int k = 0; k < data.d(); ++k) out << format_double(data.X()(i, k)) << ",";
    out << format_double(data.y()(i)) << "\n";
  }
}

SyntheticDataset synthetic_regression(int n, int d, std::uint64_t seed,
                                      double noise_sigma, InputLaw law) {
  if (n < 1 || d < 1) throw std::invalid_argument("synthetic_regression: need n, d >= 1");
  if (noise_sigma < 0) throw std::invalid_argument("synthetic_regression: noise < 0");
  Pcg32 rng = make_stream(seed, StreamId::dataset);

  Mat X(n, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) X(i, k) = rng.next_gaussian();
  if (law == InputLaw::sphere) {
    for (int i = 0; i < n; ++i) {
      const double norm = X.row(i).norm();
      if (norm > 0) X.row(i) *= std::sqrt(static_cast<double>(d)) / norm;
    }
  }

  Vec planted(d);
  for (int k = 0; k < d; ++k) planted(k) = rng.next_gaussian();
  planted /= std::sqrt(static_cast<double>(d));

  Vec y = X * planted;
  if (noise_sigma > 0) {
    for (int i = 0; i < n; ++i) y(i) += noise_sigma * rng.next_gaussian();
  }
  return SyntheticDataset{Dataset(std::move(X), std::move(y)), std::move(planted)};
}

std::string to_string(Provenance p) {
  return p == Provenance::analytic ? "analytic" : "numeric-estimate";
}

Vec zero_param(int d) {
  if (d < 1) throw std::invalid_argument("zero_param: dimension must be >= 1");
  return Vec::Zero(d);
}

Vec gaussian_vec(Pcg32& rng, int d) {
  Vec v(d);
  for (int k = 0; k < d; ++k) v(k) = rng.next_gaussian();
  return v;
}

Vec sample_in_ball(Pcg32& rng, int d, double radius) {
  Vec dir = gaussian_vec(rng, d);
  const double norm = dir.norm();
  if (norm == 0) return Vec::Zero(d);
  const double r = radius * std::pow(rng.next_double(), 1.0 / d);
  return dir * (r / norm);
}

}  // namespace sgdlab
