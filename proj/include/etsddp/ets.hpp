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

#ifndef ETSDDP_ETS_HPP_
#define ETSDDP_ETS_HPP_

#include "etsddp/ddp.hpp"
#include "etsddp/ellipsoid.hpp"

#include <string>

namespace etsddp {

/**
 * Objective for an ellipsoidal target set.
 *
 * Values are the set-target costs L(x - P(x), u) and phi(x - P(x)).
 * Expansions use the locally smoothed costs whose inside/outside branch per
 * time step is frozen by prepare() from the reference trajectory; the
 * backward pass never classifies the states it is expanding.
 */
class EllipsoidTargetObjective final : public Objective {
 public:
  EllipsoidTargetObjective(const OffsetCost& cost, Ellipsoid target,
                           ProjectionMode mode = ProjectionMode::Consistent);

  double stage_value(int t, const State& x, const Control& u) const override;
  double terminal_value(const State& x) const override;
  CostExpansion stage_expansion(int t, const State& x, const Control& u) const override;
  CostExpansion terminal_expansion(const State& x) const override;
  void prepare(const Trajectory& reference) override;

  const BranchFlags& flags() const { return flags_; }
  const Ellipsoid& target() const { return target_; }
  ProjectionMode mode() const { return mode_; }

 private:
  bool inside(std::size_t t, const State& x) const;

  const OffsetCost& cost_;
  Ellipsoid target_;
  ProjectionMode mode_;
  BranchFlags flags_;
};

struct EtsConfig {
  SolverConfig base;
  Ellipsoid target;
  ProjectionMode mode = ProjectionMode::Consistent;
  // Point used by the common comparison metric (defaults to the origin).
  State evaluation_point;
};

/// Sum of L(x_t - c, u_t) plus phi(x_T - c).
double comparison_cost(const Trajectory& trajectory, const OffsetCost& cost, const State& point);

/// Set-target DDP. Fills comparison_history with the point metric at
/// cfg.evaluation_point and records the terminal Mahalanobis distance.
SolveReport ets_solve(const State& initial_state, const Dynamics& dynamics, const OffsetCost& cost,
                      const EtsConfig& cfg, const IterationObserver& observer = {});

/// Conventional DDP towards the point c. comparison_history uses
/// `evaluation_point` when given, c otherwise.
SolveReport point_solve(const State& initial_state, const Dynamics& dynamics,
                        const OffsetCost& cost, const State& target, const SolverConfig& base,
                        const std::optional<State>& evaluation_point = std::nullopt,
                        const IterationObserver& observer = {});

struct ComparisonRecord {
  std::string method;
  int iterations = 0;
  bool converged = false;
  double seconds_per_iteration = 0.0;
  double total_seconds = 0.0;
  double comparison_cost = 0.0;
  State terminal_state;
  double terminal_mahalanobis = 0.0;
};

struct ComparisonResult {
  SolveReport point_report;
  SolveReport ets_report;
  ComparisonRecord point;
  ComparisonRecord ets;
};

/// Runs point DDP towards cfg.evaluation_point and set-target DDP on the same
/// solver settings, and scores both with the common comparison metric.
ComparisonResult compare(const State& initial_state, const Dynamics& dynamics,
                         const OffsetCost& cost, const EtsConfig& cfg);

}  // namespace etsddp

#endif  // ETSDDP_ETS_HPP_
