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

#include "etsddp/ellipsoid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace etsddp {

namespace {

constexpr double kSymmetryTolerance = 1e-8;

void check_dim(const Ellipsoid& set, const Eigen::VectorXd& x, const char* where) {
  if (x.size() != set.dim()) {
    throw DimensionError(std::string(where) + ": point dimension does not match the ellipsoid");
  }
}

bool degenerate(const Ellipsoid& set, ProjectionMode mode) {
  return mode == ProjectionMode::Consistent && set.radius() == 0.0;
}

CostExpansion compose(CostExpansion base, const Ellipsoid& set, const State& x,
                      ProjectionMode mode) {
  // With r = 0 the offset map is x - o and its Jacobian is exactly I; skip the
  // products so results match the point-target expansion bit for bit.
  if (degenerate(set, mode)) return base;
  const Eigen::MatrixXd jac = offset_jacobian(set, x, mode);
  base.grad_x = jac.transpose() * base.grad_x;
  base.hess_xx = jac.transpose() * base.hess_xx * jac;
  base.hess_xx = 0.5 * (base.hess_xx + base.hess_xx.transpose()).eval();
  base.hess_ux = base.hess_ux * jac;
  return base;
}

CostExpansion frozen_x(CostExpansion base) {
  base.grad_x.setZero();
  base.hess_xx.setZero();
  base.hess_ux.setZero();
  return base;
}

Eigen::VectorXd inside_offset(const Ellipsoid& set, ProjectionMode mode) {
  // Consistent: x - x = 0. Verbatim: x - (x - o) = o.
  return mode == ProjectionMode::Consistent ? Eigen::VectorXd::Zero(set.dim()) : set.center();
}

}  // namespace

Ellipsoid::Ellipsoid(Eigen::VectorXd center, Eigen::MatrixXd shape, double radius)
    : center_(std::move(center)), radius_(radius) {
  const auto n = center_.size();
  if (n == 0) throw DimensionError("Ellipsoid: empty center");
  if (shape.rows() != n || shape.cols() != n) {
    throw DimensionError("Ellipsoid: shape must be n x n with n = center dimension");
  }
  if (!center_.allFinite() || !shape.allFinite()) {
    throw std::invalid_argument("Ellipsoid: non-finite entries");
  }
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("Ellipsoid: radius must be finite and nonnegative");
  }
  const double scale = std::max(1.0, shape.cwiseAbs().maxCoeff());
  if ((shape - shape.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    throw std::invalid_argument("Ellipsoid: shape matrix is not symmetric");
  }
  shape_ = 0.5 * (shape + shape.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(shape_);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(shape_, Eigen::EigenvaluesOnly);
  if (llt.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > 0.0)) {
    throw std::invalid_argument("Ellipsoid: shape matrix is not positive definite");
  }
  cholesky_lower_ = llt.matrixL();
  shape_inverse_ = llt.solve(Eigen::MatrixXd::Identity(n, n));
  shape_inverse_ = 0.5 * (shape_inverse_ + shape_inverse_.transpose()).eval();
}

std::string_view to_string(ProjectionMode mode) {
  return mode == ProjectionMode::Consistent ? "consistent" : "verbatim";
}

ProjectionMode projection_mode_from_string(std::string_view name) {
  if (name == "consistent") return ProjectionMode::Consistent;
  if (name == "verbatim") return ProjectionMode::Verbatim;
  throw std::invalid_argument("unknown projection mode '" + std::string(name) +
                              "' (expected consistent or verbatim)");
}

double mahalanobis(const Eigen::VectorXd& x, const Ellipsoid& set) {
  check_dim(set, x, "mahalanobis");
  const Eigen::VectorXd y =
      set.cholesky_lower().triangularView<Eigen::Lower>().solve(x - set.center());
  return y.norm();
}

bool contains(const Ellipsoid& set, const Eigen::VectorXd& x) {
  return mahalanobis(x, set) < set.radius();
}

Eigen::VectorXd project(const Ellipsoid& set, const Eigen::VectorXd& x, ProjectionMode mode) {
  check_dim(set, x, "project");
  if (degenerate(set, mode)) return set.center();
  if (contains(set, x)) {
    return mode == ProjectionMode::Consistent ? x : Eigen::VectorXd(x - set.center());
  }
  if (mode == ProjectionMode::Consistent) {
    const double d = mahalanobis(x, set);
    return set.center() + (set.radius() / d) * (x - set.center());
  }
  const Eigen::VectorXd sw = set.shape() * (x - set.center());
  return (set.radius() / std::sqrt((x - set.center()).dot(sw))) * sw;
}

Eigen::VectorXd offset(const Ellipsoid& set, const Eigen::VectorXd& x, ProjectionMode mode) {
  check_dim(set, x, "offset");
  if (degenerate(set, mode)) return x - set.center();
  if (contains(set, x)) return inside_offset(set, mode);
  return outside_offset(set, x, mode);
}

Eigen::VectorXd outside_offset(const Ellipsoid& set, const Eigen::VectorXd& x,
                               ProjectionMode mode) {
  check_dim(set, x, "outside_offset");
  const Eigen::VectorXd w = x - set.center();
  if (degenerate(set, mode)) return w;
  if (mode == ProjectionMode::Consistent) {
    const double d = mahalanobis(x, set);
    if (d == 0.0) throw std::domain_error("outside_offset: point coincides with the center");
    return w - (set.radius() / d) * w;
  }
  const Eigen::VectorXd sw = set.shape() * w;
  const double s = std::sqrt(w.dot(sw));
  if (s == 0.0) throw std::domain_error("outside_offset: point coincides with the center");
  return x - (set.radius() / s) * sw;
}

Eigen::MatrixXd offset_jacobian(const Ellipsoid& set, const Eigen::VectorXd& x,
                                ProjectionMode mode) {
  check_dim(set, x, "offset_jacobian");
  const auto n = set.dim();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  if (degenerate(set, mode)) return eye;
  const Eigen::VectorXd w = x - set.center();
  const double r = set.radius();
  if (mode == ProjectionMode::Consistent) {
    const double d = mahalanobis(x, set);
    if (d == 0.0) throw std::domain_error("offset_jacobian: point coincides with the center");
    const Eigen::VectorXd siw = set.shape_inverse() * w;
    return eye - (r / d) * (eye - w * siw.transpose() / (d * d));
  }
  const Eigen::VectorXd sw = set.shape() * w;
  const double s = std::sqrt(w.dot(sw));
  if (s == 0.0) throw std::domain_error("offset_jacobian: point coincides with the center");
  return eye - (r / s) * (set.shape() - sw * sw.transpose() / (s * s));
}

BranchFlags branch_flags(const Ellipsoid& set, const Trajectory& reference) {
  if (reference.states.empty()) throw std::invalid_argument("branch_flags: empty trajectory");
  BranchFlags flags;
  flags.inside.reserve(reference.states.size());
  for (const auto& x : reference.states) flags.inside.push_back(contains(set, x));
  return flags;
}

double set_stage_value(const OffsetCost& cost, const Ellipsoid& set, const State& x,
                       const Control& u, ProjectionMode mode) {
  return cost.stage_value(offset(set, x, mode), u);
}

double set_terminal_value(const OffsetCost& cost, const Ellipsoid& set, const State& x,
                          ProjectionMode mode) {
  return cost.terminal_value(offset(set, x, mode));
}

CostExpansion smoothed_stage_expansion(const OffsetCost& cost, const Ellipsoid& set,
                                       const State& x, const Control& u, bool inside,
                                       ProjectionMode mode) {
  check_dim(set, x, "smoothed_stage_expansion");
  if (inside && !degenerate(set, mode)) {
    return frozen_x(cost.stage_expansion(inside_offset(set, mode), u));
  }
  return compose(cost.stage_expansion(outside_offset(set, x, mode), u), set, x, mode);
}

CostExpansion smoothed_terminal_expansion(const OffsetCost& cost, const Ellipsoid& set,
                                          const State& x, bool inside, ProjectionMode mode) {
  check_dim(set, x, "smoothed_terminal_expansion");
  if (inside && !degenerate(set, mode)) {
    return frozen_x(cost.terminal_expansion(inside_offset(set, mode)));
  }
  return compose(cost.terminal_expansion(outside_offset(set, x, mode)), set, x, mode);
}

}  // namespace etsddp
