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

#include "etsddp/model.hpp"

#include <cmath>
#include <numeric>

namespace etsddp {

void Dynamics::add_second_order(const State& x, const Control& u,
                                DynamicsExpansion& expansion) const {
  const int n = state_dim();
  const int l = control_dim();
  expansion.tens_xx.assign(n, Eigen::MatrixXd::Zero(n, n));
  expansion.tens_ux.assign(n, Eigen::MatrixXd::Zero(l, n));
  expansion.tens_uu.assign(n, Eigen::MatrixXd::Zero(l, l));

  for (int a = 0; a < n; ++a) {
    const double h = 1e-5 * std::max(1.0, std::abs(x[a]));
    State xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    const DynamicsExpansion ep = linearize(xp, u);
    const DynamicsExpansion em = linearize(xm, u);
    for (int i = 0; i < n; ++i) {
      expansion.tens_xx[i].row(a) = (ep.jac_x.row(i) - em.jac_x.row(i)) / (2.0 * h);
    }
  }
  for (int c = 0; c < l; ++c) {
    const double h = 1e-5 * std::max(1.0, std::abs(u[c]));
    Control up = u, um = u;
    up[c] += h;
    um[c] -= h;
    const DynamicsExpansion ep = linearize(x, up);
    const DynamicsExpansion em = linearize(x, um);
    for (int i = 0; i < n; ++i) {
      expansion.tens_ux[i].row(c) = (ep.jac_x.row(i) - em.jac_x.row(i)) / (2.0 * h);
      expansion.tens_uu[i].row(c) = (ep.jac_u.row(i) - em.jac_u.row(i)) / (2.0 * h);
    }
  }
  for (int i = 0; i < n; ++i) {
    expansion.tens_xx[i] = 0.5 * (expansion.tens_xx[i] + expansion.tens_xx[i].transpose()).eval();
    expansion.tens_uu[i] = 0.5 * (expansion.tens_uu[i] + expansion.tens_uu[i].transpose()).eval();
  }
}

LinearDynamics::LinearDynamics(Eigen::MatrixXd a, Eigen::MatrixXd b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols() || b_.rows() != a_.rows()) {
    throw DimensionError("LinearDynamics: A must be n x n and B n x l");
  }
}

State LinearDynamics::step(const State& x, const Control& u) const { return a_ * x + b_ * u; }

DynamicsExpansion LinearDynamics::linearize(const State& x, const Control& u) const {
  DynamicsExpansion e;
  e.next = step(x, u);
  e.jac_x = a_;
  e.jac_u = b_;
  return e;
}

void LinearDynamics::add_second_order(const State&, const Control&,
                                      DynamicsExpansion& expansion) const {
  const int n = state_dim();
  const int l = control_dim();
  expansion.tens_xx.assign(n, Eigen::MatrixXd::Zero(n, n));
  expansion.tens_ux.assign(n, Eigen::MatrixXd::Zero(l, n));
  expansion.tens_uu.assign(n, Eigen::MatrixXd::Zero(l, l));
}

QuadraticOffsetCost::QuadraticOffsetCost(Eigen::MatrixXd q, Eigen::MatrixXd r, Eigen::MatrixXd qf)
    : q_(std::move(q)), r_(std::move(r)), qf_(std::move(qf)) {
  if (q_.rows() != q_.cols() || qf_.rows() != q_.rows() || qf_.cols() != q_.cols() ||
      r_.rows() != r_.cols()) {
    throw DimensionError("QuadraticOffsetCost: Q, Qf must be n x n and R l x l");
  }
}

double QuadraticOffsetCost::stage_value(const Eigen::VectorXd& offset, const Control& u) const {
  return offset.dot(q_ * offset) + u.dot(r_ * u);
}

double QuadraticOffsetCost::terminal_value(const Eigen::VectorXd& offset) const {
  return offset.dot(qf_ * offset);
}

CostExpansion QuadraticOffsetCost::stage_expansion(const Eigen::VectorXd& offset,
                                                   const Control& u) const {
  CostExpansion e;
  e.value = stage_value(offset, u);
  e.grad_x = (q_ + q_.transpose()) * offset;
  e.grad_u = (r_ + r_.transpose()) * u;
  e.hess_xx = q_ + q_.transpose();
  e.hess_uu = r_ + r_.transpose();
  e.hess_ux = Eigen::MatrixXd::Zero(r_.rows(), q_.rows());
  return e;
}

CostExpansion QuadraticOffsetCost::terminal_expansion(const Eigen::VectorXd& offset) const {
  CostExpansion e = CostExpansion::zero(static_cast<int>(q_.rows()), static_cast<int>(r_.rows()));
  e.value = terminal_value(offset);
  e.grad_x = (qf_ + qf_.transpose()) * offset;
  e.hess_xx = qf_ + qf_.transpose();
  return e;
}

PointTargetObjective::PointTargetObjective(const OffsetCost& cost, State target)
    : cost_(cost), target_(std::move(target)) {
  if (target_.size() != cost_.state_dim()) {
    throw DimensionError("PointTargetObjective: target dimension does not match the cost");
  }
}

double PointTargetObjective::stage_value(int, const State& x, const Control& u) const {
  return cost_.stage_value(x - target_, u);
}

double PointTargetObjective::terminal_value(const State& x) const {
  return cost_.terminal_value(x - target_);
}

CostExpansion PointTargetObjective::stage_expansion(int, const State& x, const Control& u) const {
  return cost_.stage_expansion(x - target_, u);
}

CostExpansion PointTargetObjective::terminal_expansion(const State& x) const {
  return cost_.terminal_expansion(x - target_);
}

double total_cost(const Trajectory& trajectory, const Objective& objective) {
  double total = 0.0;
  for (int t = 0; t < trajectory.horizon(); ++t) {
    total += objective.stage_value(t, trajectory.states[t], trajectory.controls[t]);
  }
  return total + objective.terminal_value(trajectory.terminal());
}

Trajectory rollout(const State& x0, const std::vector<Control>& controls, const Dynamics& dynamics) {
  if (x0.size() != dynamics.state_dim()) {
    throw DimensionError("rollout: initial state dimension does not match the dynamics");
  }
  Trajectory traj;
  traj.controls = controls;
  traj.states.reserve(controls.size() + 1);
  traj.states.push_back(x0);
  for (const auto& u : controls) {
    traj.states.push_back(dynamics.step(traj.states.back(), u));
  }
  return traj;
}

}  // namespace etsddp
