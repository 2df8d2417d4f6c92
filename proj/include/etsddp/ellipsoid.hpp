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

#ifndef ETSDDP_ELLIPSOID_HPP_
#define ETSDDP_ELLIPSOID_HPP_

#include "etsddp/model.hpp"
#include "etsddp/types.hpp"

#include <string_view>
#include <vector>

namespace etsddp {

/**
 * Open ellipsoid {c : sqrt((c-o)' S^-1 (c-o)) < r}.
 *
 * The shape matrix is symmetrized on construction and must be positive
 * definite; its inverse and lower Cholesky factor are cached. A radius of
 * zero is allowed and describes the empty set whose projection collapses to
 * the center, which recovers a point target.
 */
class Ellipsoid {
 public:
  Ellipsoid(Eigen::VectorXd center, Eigen::MatrixXd shape, double radius);

  int dim() const { return static_cast<int>(center_.size()); }
  const Eigen::VectorXd& center() const { return center_; }
  const Eigen::MatrixXd& shape() const { return shape_; }
  const Eigen::MatrixXd& shape_inverse() const { return shape_inverse_; }
  const Eigen::MatrixXd& cholesky_lower() const { return cholesky_lower_; }
  double radius() const { return radius_; }

 private:
  Eigen::VectorXd center_;
  Eigen::MatrixXd shape_;
  Eigen::MatrixXd shape_inverse_;
  Eigen::MatrixXd cholesky_lower_;
  double radius_;
};

/// How the closest-point map onto the set is realized.
///
/// Consistent: identity inside; outside, the radial retraction
///   o + r (x-o) / d_M(x) in the inverse-shape metric. This is the exact
///   Euclidean projection when the shape is the identity.
/// Verbatim: the closed form taken literally. Inside it returns x - o;
///   outside r S (x-o) / sqrt((x-o)' S (x-o)), using S itself and without
///   re-adding the center.
enum class ProjectionMode { Consistent, Verbatim };

std::string_view to_string(ProjectionMode mode);
/// Accepts "consistent" or "verbatim"; throws std::invalid_argument otherwise.
ProjectionMode projection_mode_from_string(std::string_view name);

double mahalanobis(const Eigen::VectorXd& x, const Ellipsoid& set);

/// Strict membership, d_M(x) < r.
bool contains(const Ellipsoid& set, const Eigen::VectorXd& x);

Eigen::VectorXd project(const Ellipsoid& set, const Eigen::VectorXd& x,
                        ProjectionMode mode = ProjectionMode::Consistent);

/// x - project(x).
Eigen::VectorXd offset(const Ellipsoid& set, const Eigen::VectorXd& x,
                       ProjectionMode mode = ProjectionMode::Consistent);

/// Outside-branch offset formula evaluated at x regardless of membership.
/// Used when the branch was frozen to "outside" by a previous iterate.
Eigen::VectorXd outside_offset(const Ellipsoid& set, const Eigen::VectorXd& x,
                               ProjectionMode mode = ProjectionMode::Consistent);

/// Jacobian of outside_offset. For the consistent mode with w = x - o and
/// d = d_M(x) this is I - (r/d)(I - w w' S^-1 / d^2); with r = 0 it is the
/// identity.
Eigen::MatrixXd offset_jacobian(const Ellipsoid& set, const Eigen::VectorXd& x,
                                ProjectionMode mode = ProjectionMode::Consistent);

struct BranchFlags {
  std::vector<bool> inside;  // one flag per state, t = 0..T
};

BranchFlags branch_flags(const Ellipsoid& set, const Trajectory& reference);

/// Stage cost of the set-target problem, L(x - P(x), u).
double set_stage_value(const OffsetCost& cost, const Ellipsoid& set, const State& x,
                       const Control& u, ProjectionMode mode = ProjectionMode::Consistent);
double set_terminal_value(const OffsetCost& cost, const Ellipsoid& set, const State& x,
                          ProjectionMode mode = ProjectionMode::Consistent);

/// Expansion of the locally smoothed stage cost with its branch frozen by
/// `inside`. The inside branch is constant in x (zero x-derivatives). The
/// outside branch composes the base cost with the offset map and uses the
/// Gauss-Newton Hessian J' H J; the curvature of the offset map is dropped.
CostExpansion smoothed_stage_expansion(const OffsetCost& cost, const Ellipsoid& set,
                                       const State& x, const Control& u, bool inside,
                                       ProjectionMode mode = ProjectionMode::Consistent);
CostExpansion smoothed_terminal_expansion(const OffsetCost& cost, const Ellipsoid& set,
                                          const State& x, bool inside,
                                          ProjectionMode mode = ProjectionMode::Consistent);

}  // namespace etsddp

#endif  // ETSDDP_ELLIPSOID_HPP_
