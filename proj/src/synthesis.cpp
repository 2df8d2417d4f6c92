/*
 Copyright 2026 The etsddp Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "etsddp/synthesis.hpp"

#include "etsddp/chi2.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace etsddp {

Dataset::Dataset(int dimension) : dimension_(dimension) {
  if (dimension < 1) throw std::invalid_argument("Dataset: dimension must be positive");
}

void Dataset::append(LabeledSample sample) {
  if (sample.point.size() != dimension_) {
    throw DimensionError("Dataset: sample dimension does not match the dataset");
  }
  if (!sample.point.allFinite() || !std::isfinite(sample.timestamp)) {
    throw std::invalid_argument("Dataset: non-finite sample");
  }
  if (sample.accepted) ++accepted_;
  samples_.push_back(std::move(sample));
}

std::vector<Eigen::VectorXd> Dataset::accepted_points() const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(accepted_);
  for (const auto& s : samples_) {
    if (s.accepted) out.push_back(s.point);
  }
  return out;
}

Eigen::VectorXd sample_mean(const std::vector<Eigen::VectorXd>& points) {
  if (points.empty()) throw std::invalid_argument("sample_mean: no points");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(points.front().size());
  for (const auto& p : points) {
    if (p.size() != sum.size()) throw DimensionError("sample_mean: mixed dimensions");
    sum += p;
  }
  return sum / static_cast<double>(points.size());
}

Eigen::MatrixXd sample_covariance(const std::vector<Eigen::VectorXd>& points) {
  if (points.size() < 2) throw std::invalid_argument("sample_covariance: need at least 2 points");
  const Eigen::VectorXd mean = sample_mean(points);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(mean.size(), mean.size());
  for (const auto& p : points) {
    const Eigen::VectorXd d = p - mean;
    s.noalias() += d * d.transpose();
  }
  s /= static_cast<double>(points.size() - 1);
  return 0.5 * (s + s.transpose());
}

GaussianEstimate estimate_gaussian(const std::vector<Eigen::VectorXd>& points) {
  return {sample_mean(points), sample_covariance(points)};
}

int default_min_samples(int dimension) { return std::max(dimension + 1, 10); }

Ellipsoid synthesize_ellipsoid(const Dataset& data, double alpha, const SynthesisOptions& options) {
  if (!(alpha > 0 && alpha < 1)) {
    throw std::invalid_argument("synthesize_ellipsoid: alpha must lie in (0, 1)");
  }
  const int n = data.dimension();
  const int required = std::max(options.min_samples.value_or(default_min_samples(n)), n + 1);
  if (data.accepted_count() < required) {
    std::ostringstream msg;
    msg << "synthesize_ellipsoid: " << data.accepted_count() << " accepted samples, need at least "
        << required;
    throw SynthesisError(msg.str());
  }

  const GaussianEstimate est = estimate_gaussian(data.accepted_points());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(est.covariance);
  const double largest = eig.eigenvalues().maxCoeff();
  const double smallest = eig.eigenvalues().minCoeff();
  if (!(largest > 0) || smallest <= 1e-12 * largest) {
    std::ostringstream msg;
    msg << "synthesize_ellipsoid: sample covariance is degenerate along direction ["
        << eig.eigenvectors().col(0).transpose() << "] (eigenvalue " << smallest << ")";
    throw SynthesisError(msg.str());
  }
  return Ellipsoid(est.mean, est.covariance, std::sqrt(chi2_quantile(alpha, n)));
}

double coverage_fraction(const Dataset& data, const Ellipsoid& set) {
  const auto points = data.accepted_points();
  if (points.empty()) return 0.0;
  int inside = 0;
  for (const auto& p : points) {
    if (mahalanobis(p, set) <= set.radius()) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(points.size());
}

double RandomSource::uniform() {
  // 53 random mantissa bits, shifted into (0, 1].
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double RandomSource::normal() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

MvnSampler::MvnSampler(Eigen::VectorXd mean, const Eigen::MatrixXd& covariance)
    : mean_(std::move(mean)) {
  if (covariance.rows() != mean_.size() || covariance.cols() != mean_.size()) {
    throw DimensionError("MvnSampler: covariance shape does not match the mean");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (covariance + covariance.transpose()));
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("MvnSampler: covariance is not positive definite");
  }
  lower_ = llt.matrixL();
}

Eigen::VectorXd MvnSampler::sample(RandomSource& rng) const {
  Eigen::VectorXd z(mean_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return mean_ + lower_ * z;
}

Eigen::VectorXd mvn_sample(const Eigen::VectorXd& mean, const Eigen::MatrixXd& covariance,
                           RandomSource& rng) {
  return MvnSampler(mean, covariance).sample(rng);
}

}  // namespace etsddp
