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

#ifndef ETSDDP_MODEL_HPP_
#define ETSDDP_MODEL_HPP_

#include "etsddp/types.hpp"

namespace etsddp {

/// Discrete-time system x_{t+1} = f(x_t, u_t).
class Dynamics {
 public:
  virtual ~Dynamics() = default;

  virtual int state_dim() const = 0;
  virtual int control_dim() const = 0;

  virtual State step(const State& x, const Control& u) const = 0;

  /// First-order expansion; tensor slices are left empty.
  virtual DynamicsExpansion linearize(const State& x, const Control& u) const = 0;

  /// Fills the tensor slices of `expansion`. The default differentiates
  /// linearize() by central differences.
  virtual void add_second_order(const State& x, const Control& u,
                                DynamicsExpansion& expansion) const;
};

/// Total cost seen by the solver, expressed directly in the state.
///
/// prepare() is called with the last accepted trajectory before each backward
/// pass. Implementations may use it to freeze expansion-time choices (branch
/// selection for set targets). Values returned by stage_value/terminal_value
/// must not depend on prepare(), so line-search comparisons stay consistent
/// across iterations.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual double stage_value(int t, const State& x, const Control& u) const = 0;
  virtual double terminal_value(const State& x) const = 0;
  virtual CostExpansion stage_expansion(int t, const State& x, const Control& u) const = 0;
  virtual CostExpansion terminal_expansion(const State& x) const = 0;

  virtual void prepare(const Trajectory& /*reference*/) {}
};

/// Stage cost L(a, u) and terminal cost phi(a) written in terms of the offset
/// a = x - target. Point and set targets both compose with this.
class OffsetCost {
 public:
  virtual ~OffsetCost() = default;

  virtual int state_dim() const = 0;
  virtual int control_dim() const = 0;

  virtual double stage_value(const Eigen::VectorXd& offset, const Control& u) const = 0;
  virtual double terminal_value(const Eigen::VectorXd& offset) const = 0;
  /// Derivatives with respect to (offset, u).
  virtual CostExpansion stage_expansion(const Eigen::VectorXd& offset, const Control& u) const = 0;
  virtual CostExpansion terminal_expansion(const Eigen::VectorXd& offset) const = 0;
};

/// x' = A x + B u.
class LinearDynamics final : public Dynamics {
 public:
  LinearDynamics(Eigen::MatrixXd a, Eigen::MatrixXd b);

  int state_dim() const override { return static_cast<int>(a_.rows()); }
  int control_dim() const override { return static_cast<int>(b_.cols()); }
  State step(const State& x, const Control& u) const override;
  DynamicsExpansion linearize(const State& x, const Control& u) const override;
  void add_second_order(const State& x, const Control& u,
                        DynamicsExpansion& expansion) const override;

  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::MatrixXd& b() const { return b_; }

 private:
  Eigen::MatrixXd a_;
  Eigen::MatrixXd b_;
};

/// L(a, u) = a'Qa + u'Ru, phi(a) = a'Qf a (no one-half factor).
class QuadraticOffsetCost final : public OffsetCost {
 public:
  QuadraticOffsetCost(Eigen::MatrixXd q, Eigen::MatrixXd r, Eigen::MatrixXd qf);

  int state_dim() const override { return static_cast<int>(q_.rows()); }
  int control_dim() const override { return static_cast<int>(r_.rows()); }
  double stage_value(const Eigen::VectorXd& offset, const Control& u) const override;
  double terminal_value(const Eigen::VectorXd& offset) const override;
  CostExpansion stage_expansion(const Eigen::VectorXd& offset, const Control& u) const override;
  CostExpansion terminal_expansion(const Eigen::VectorXd& offset) const override;

 private:
  Eigen::MatrixXd q_;
  Eigen::MatrixXd r_;
  Eigen::MatrixXd qf_;
};

/// Conventional fixed-target objective: costs evaluated at x - c.
class PointTargetObjective final : public Objective {
 public:
  PointTargetObjective(const OffsetCost& cost, State target);

  double stage_value(int t, const State& x, const Control& u) const override;
  double terminal_value(const State& x) const override;
  CostExpansion stage_expansion(int t, const State& x, const Control& u) const override;
  CostExpansion terminal_expansion(const State& x) const override;

  const State& target() const { return target_; }

 private:
  const OffsetCost& cost_;
  State target_;
};

/// Sum of stage costs plus terminal cost along a trajectory.
double total_cost(const Trajectory& trajectory, const Objective& objective);

/// Rolls out the controls from x0.
Trajectory rollout(const State& x0, const std::vector<Control>& controls, const Dynamics& dynamics);

}  // namespace etsddp

#endif  // ETSDDP_MODEL_HPP_
