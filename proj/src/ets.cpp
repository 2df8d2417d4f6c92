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

#include "etsddp/ets.hpp"

namespace etsddp {

namespace {

// Runs the solver while scoring the initial rollout and every accepted
// iterate with the point metric at `point`.
SolveReport solve_with_metric(const State& initial_state, const Dynamics& dynamics,
                              Objective& objective, const SolverConfig& config,
                              const OffsetCost& cost, const State& point,
                              const IterationObserver& observer) {
  config.validate(dynamics.control_dim());
  std::vector<double> history;
  {
    const std::vector<Control> zeros(config.horizon, Control::Zero(dynamics.control_dim()));
    history.push_back(comparison_cost(rollout(initial_state, zeros, dynamics), cost, point));
  }
  auto watch = [&](const IterationEvent& event) {
    if (event.accepted) history.push_back(comparison_cost(*event.trajectory, cost, point));
    if (observer) observer(event);
  };
  SolveReport report = solve(initial_state, dynamics, objective, config, watch);
  report.comparison_history = std::move(history);
  return report;
}

}  // namespace

EllipsoidTargetObjective::EllipsoidTargetObjective(const OffsetCost& cost, Ellipsoid target,
                                                   ProjectionMode mode)
    : cost_(cost), target_(std::move(target)), mode_(mode) {
  if (target_.dim() != cost_.state_dim()) {
    throw DimensionError("EllipsoidTargetObjective: target dimension does not match the cost");
  }
}

bool EllipsoidTargetObjective::inside(std::size_t t, const State& x) const {
  // Before the first prepare() there is no reference; classify the nominal.
  if (t < flags_.inside.size()) return flags_.inside[t];
  return contains(target_, x);
}

double EllipsoidTargetObjective::stage_value(int, const State& x, const Control& u) const {
  return set_stage_value(cost_, target_, x, u, mode_);
}

double EllipsoidTargetObjective::terminal_value(const State& x) const {
  return set_terminal_value(cost_, target_, x, mode_);
}

CostExpansion EllipsoidTargetObjective::stage_expansion(int t, const State& x,
                                                        const Control& u) const {
  return smoothed_stage_expansion(cost_, target_, x, u, inside(static_cast<std::size_t>(t), x),
                                  mode_);
}

CostExpansion EllipsoidTargetObjective::terminal_expansion(const State& x) const {
  const std::size_t t = flags_.inside.empty() ? 0 : flags_.inside.size() - 1;
  const bool in = flags_.inside.empty() ? contains(target_, x) : flags_.inside[t];
  return smoothed_terminal_expansion(cost_, target_, x, in, mode_);
}

void EllipsoidTargetObjective::prepare(const Trajectory& reference) {
  flags_ = branch_flags(target_, reference);
}

double comparison_cost(const Trajectory& trajectory, const OffsetCost& cost, const State& point) {
  double total = 0.0;
  for (int t = 0; t < trajectory.horizon(); ++t) {
    total += cost.stage_value(trajectory.states[t] - point, trajectory.controls[t]);
  }
  return total + cost.terminal_value(trajectory.terminal() - point);
}

SolveReport ets_solve(const State& initial_state, const Dynamics& dynamics, const OffsetCost& cost,
                      const EtsConfig& cfg, const IterationObserver& observer) {
  EllipsoidTargetObjective objective(cost, cfg.target, cfg.mode);
  const State point = cfg.evaluation_point.size() == 0
                          ? State::Zero(dynamics.state_dim())
                          : cfg.evaluation_point;
  SolveReport report =
      solve_with_metric(initial_state, dynamics, objective, cfg.base, cost, point, observer);
  report.terminal_mahalanobis = mahalanobis(report.trajectory.terminal(), cfg.target);
  return report;
}

SolveReport point_solve(const State& initial_state, const Dynamics& dynamics,
                        const OffsetCost& cost, const State& target, const SolverConfig& base,
                        const std::optional<State>& evaluation_point,
                        const IterationObserver& observer) {
  PointTargetObjective objective(cost, target);
  return solve_with_metric(initial_state, dynamics, objective, base, cost,
                           evaluation_point.value_or(target), observer);
}

ComparisonResult compare(const State& initial_state, const Dynamics& dynamics,
                         const OffsetCost& cost, const EtsConfig& cfg) {
  const State point = cfg.evaluation_point.size() == 0
                          ? State::Zero(dynamics.state_dim())
                          : cfg.evaluation_point;
  ComparisonResult out;
  out.point_report = point_solve(initial_state, dynamics, cost, point, cfg.base);
  out.point_report.terminal_mahalanobis =
      mahalanobis(out.point_report.trajectory.terminal(), cfg.target);
  out.ets_report = ets_solve(initial_state, dynamics, cost, cfg);

  auto record = [&](const std::string& name, const SolveReport& r) {
    ComparisonRecord rec;
    rec.method = name;
    rec.iterations = r.iterations;
    rec.converged = r.converged;
    rec.seconds_per_iteration = r.mean_iteration_seconds();
    rec.total_seconds = r.total_seconds();
    rec.comparison_cost = comparison_cost(r.trajectory, cost, point);
    rec.terminal_state = r.trajectory.terminal();
    rec.terminal_mahalanobis = r.terminal_mahalanobis.value_or(0.0);
    return rec;
  };
  out.point = record("DDP", out.point_report);
  out.ets = record("ETS-DDP", out.ets_report);
  return out;
}

}  // namespace etsddp
