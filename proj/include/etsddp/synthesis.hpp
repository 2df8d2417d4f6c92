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

#ifndef ETSDDP_SYNTHESIS_HPP_
#define ETSDDP_SYNTHESIS_HPP_

#include "etsddp/ellipsoid.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace etsddp {

struct LabeledSample {
  Eigen::VectorXd point;
  bool accepted = true;
  double timestamp = 0.0;  // seconds since epoch
};

/// Expert-labeled terminal states. Append-only; every point has `dimension`
/// finite entries.
class Dataset {
 public:
  explicit Dataset(int dimension);

  int dimension() const { return dimension_; }
  const std::vector<LabeledSample>& samples() const { return samples_; }
  int size() const { return static_cast<int>(samples_.size()); }
  int accepted_count() const { return accepted_; }
  int rejected_count() const { return size() - accepted_; }

  void append(LabeledSample sample);
  std::vector<Eigen::VectorXd> accepted_points() const;

 private:
  int dimension_;
  std::vector<LabeledSample> samples_;
  int accepted_ = 0;
};

struct GaussianEstimate {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

Eigen::VectorXd sample_mean(const std::vector<Eigen::VectorXd>& points);

/// Unbiased estimator with the 1/(N-1) factor. Exactly symmetric.
Eigen::MatrixXd sample_covariance(const std::vector<Eigen::VectorXd>& points);

GaussianEstimate estimate_gaussian(const std::vector<Eigen::VectorXd>& points);

/// Smallest accepted-sample count synthesis will work with by default.
int default_min_samples(int dimension);

struct SynthesisOptions {
  // Defaults to default_min_samples(n) when unset.
  std::optional<int> min_samples;
};

/// Raised when the accepted samples cannot support an ellipsoid (too few
/// points or a rank-deficient covariance).
class SynthesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ellipsoid with center = sample mean, shape = sample covariance and
/// radius = sqrt of the upper-alpha chi-squared quantile, over accepted
/// samples only.
Ellipsoid synthesize_ellipsoid(const Dataset& data, double alpha,
                               const SynthesisOptions& options = {});

/// Fraction of accepted points with d_M <= r.
double coverage_fraction(const Dataset& data, const Ellipsoid& set);

/// Seeded source of uniforms and standard normals. Normals come from the
/// Box-Muller transform on a 64-bit Mersenne Twister, so a seed reproduces
/// the same stream on every platform.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1].
  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Multivariate normal sampler x = mean + L z with L the lower Cholesky
/// factor of the covariance.
class MvnSampler {
 public:
  MvnSampler(Eigen::VectorXd mean, const Eigen::MatrixXd& covariance);

  Eigen::VectorXd sample(RandomSource& rng) const;
  const Eigen::MatrixXd& cholesky_lower() const { return lower_; }
  const Eigen::VectorXd& mean() const { return mean_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd lower_;
};

Eigen::VectorXd mvn_sample(const Eigen::VectorXd& mean, const Eigen::MatrixXd& covariance,
                           RandomSource& rng);

}  // namespace etsddp

#endif  // ETSDDP_SYNTHESIS_HPP_
