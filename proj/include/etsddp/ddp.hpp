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

#ifndef ETSDDP_DDP_HPP_
#define ETSDDP_DDP_HPP_

#include "etsddp/model.hpp"
#include "etsddp/types.hpp"

#include <functional>
#include <optional>

namespace etsddp {

/// Bounds on the control correction du at one step, i.e. the absolute box
/// shifted by the nominal control.
struct StepBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::VectorXd warm_start;
};

struct Gains {
  Eigen::VectorXd k;
  Eigen::MatrixXd K;
};

/// Q-function expansion around a nominal (x, u). When use_second_order is set
/// the dynamics tensors are contracted with v_x; they must then be present.
QExpansion quadratize_q(const CostExpansion& cost, const DynamicsExpansion& dyn,
                        const ValueExpansion& value_next, bool use_second_order);

/// Minimizer of the local Q model. Returns nullopt when q_uu + reg*I is not
/// positive definite, in which case the caller should raise the
/// regularization and retry. With a box, rows of K for clamped coordinates
/// are zero.
std::optional<Gains> compute_gains(const QExpansion& q, double regularization,
                                   const StepBox* box = nullptr);

/// Cost and dynamics expansions along a nominal trajectory.
struct TrajectoryExpansion {
  std::vector<CostExpansion> stage;
  CostExpansion terminal;
  std::vector<DynamicsExpansion> dynamics;
};

TrajectoryExpansion expand(const Trajectory& trajectory, const Dynamics& dynamics,
                           const Objective& objective, bool second_order);

struct BackwardPassResult {
  GainSchedule gains;
  // values[t] is the value expansion at x_t, t = 0..T.
  std::vector<ValueExpansion> values;
  // Set when q_uu failed to be positive definite; holds that step index.
  std::optional<int> failed_step;

  bool ok() const { return !failed_step.has_value(); }
};

BackwardPassResult backward_pass(const Trajectory& trajectory, const TrajectoryExpansion& expansion,
                                 const SolverConfig& config, double regularization);

BackwardPassResult backward_pass(const Trajectory& trajectory, const Dynamics& dynamics,
                                 const Objective& objective, const SolverConfig& config,
                                 double regularization);

struct ForwardPassResult {
  Trajectory trajectory;
  double cost = 0.0;
};

/// Rolls out u_t = u_prev_t + step*k_t + K_t(x_t - x_prev_t), clamped to the
/// box when one is configured. Returns nullopt if the rollout leaves the
/// finite range.
std::optional<ForwardPassResult> forward_pass(const Trajectory& previous, const GainSchedule& gains,
                                              double step, const Dynamics& dynamics,
                                              const Objective& objective,
                                              const SolverConfig& config);

/// Snapshot handed to an iteration observer after each outer iteration.
struct IterationEvent {
  int iteration = 0;
  bool accepted = false;
  double cost = 0.0;
  double step = 0.0;
  double regularization = 0.0;
  const Trajectory* trajectory = nullptr;
};

using IterationObserver = std::function<void(const IterationEvent&)>;

/// Iterates backward/forward passes from a zero-control rollout until the
/// accepted cost change drops below the tolerance. Never throws on numerical
/// failure; the report carries converged=false and a message instead.
SolveReport solve(const State& initial_state, const Dynamics& dynamics, Objective& objective,
                  const SolverConfig& config, const IterationObserver& observer = {});

}  // namespace etsddp

#endif  // ETSDDP_DDP_HPP_
