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

#include "etsddp/ddp.hpp"

#include "etsddp/box_qp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

namespace etsddp {

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

void require(bool condition, const char* what) {
  if (!condition) throw DimensionError(what);
}

}  // namespace

void SolverConfig::validate(int control_dim) const {
  if (horizon < 1) throw ConfigError("horizon", "must be at least 1");
  if (max_iterations < 1) throw ConfigError("max_iterations", "must be at least 1");
  if (!(cost_tolerance > 0)) throw ConfigError("cost_tolerance", "must be positive");
  const auto& reg = regularization;
  if (!(reg.min > 0) || !(reg.min <= reg.initial) || !(reg.initial <= reg.max)) {
    throw ConfigError("regularization", "requires 0 < min <= initial <= max");
  }
  if (!(reg.decrease > 0 && reg.decrease < 1)) {
    throw ConfigError("regularization.decrease", "must lie in (0, 1)");
  }
  if (!(reg.increase > 1)) throw ConfigError("regularization.increase", "must exceed 1");
  if (line_search.empty() || line_search.front() != 1.0) {
    throw ConfigError("line_search", "must start at 1.0");
  }
  for (std::size_t i = 0; i < line_search.size(); ++i) {
    if (!(line_search[i] > 0 && line_search[i] <= 1)) {
      throw ConfigError("line_search", "steps must lie in (0, 1]");
    }
    if (i > 0 && !(line_search[i] < line_search[i - 1])) {
      throw ConfigError("line_search", "steps must be strictly descending");
    }
  }
  if (control_lower.has_value() != control_upper.has_value()) {
    throw ConfigError("control_bounds", "lower and upper must be given together");
  }
  if (control_lower) {
    if (control_lower->size() != control_dim || control_upper->size() != control_dim) {
      throw ConfigError("control_bounds", "dimension does not match the control");
    }
    if ((control_lower->array() >= control_upper->array()).any()) {
      throw ConfigError("control_bounds", "lower must be strictly below upper");
    }
  }
}

double SolveReport::mean_iteration_seconds() const {
  if (iteration_seconds.empty()) return 0.0;
  return total_seconds() / static_cast<double>(iteration_seconds.size());
}

double SolveReport::total_seconds() const {
  return std::accumulate(iteration_seconds.begin(), iteration_seconds.end(), 0.0);
}

QExpansion quadratize_q(const CostExpansion& cost, const DynamicsExpansion& dyn,
                        const ValueExpansion& value_next, bool use_second_order) {
  const auto n = dyn.jac_x.rows();
  const auto l = dyn.jac_u.cols();
  require(dyn.jac_x.cols() == n && dyn.jac_u.rows() == n, "quadratize_q: dynamics jacobian shape");
  require(cost.grad_x.size() == n && cost.grad_u.size() == l, "quadratize_q: cost gradient shape");
  require(cost.hess_xx.rows() == n && cost.hess_xx.cols() == n, "quadratize_q: cost hess_xx shape");
  require(cost.hess_ux.rows() == l && cost.hess_ux.cols() == n, "quadratize_q: cost hess_ux shape");
  require(cost.hess_uu.rows() == l && cost.hess_uu.cols() == l, "quadratize_q: cost hess_uu shape");
  require(value_next.v_x.size() == n && value_next.v_xx.rows() == n && value_next.v_xx.cols() == n,
          "quadratize_q: value expansion shape");

  const Eigen::MatrixXd vxx_fx = value_next.v_xx * dyn.jac_x;
  QExpansion q;
  q.q_x = cost.grad_x + dyn.jac_x.transpose() * value_next.v_x;
  q.q_u = cost.grad_u + dyn.jac_u.transpose() * value_next.v_x;
  q.q_xx = cost.hess_xx + dyn.jac_x.transpose() * vxx_fx;
  q.q_ux = cost.hess_ux + dyn.jac_u.transpose() * vxx_fx;
  q.q_uu = cost.hess_uu + dyn.jac_u.transpose() * value_next.v_xx * dyn.jac_u;

  if (use_second_order) {
    require(static_cast<Eigen::Index>(dyn.tens_xx.size()) == n &&
                static_cast<Eigen::Index>(dyn.tens_ux.size()) == n &&
                static_cast<Eigen::Index>(dyn.tens_uu.size()) == n,
            "quadratize_q: second-order terms requested but dynamics tensors are missing");
    for (Eigen::Index i = 0; i < n; ++i) {
      q.q_xx += value_next.v_x[i] * dyn.tens_xx[i];
      q.q_ux += value_next.v_x[i] * dyn.tens_ux[i];
      q.q_uu += value_next.v_x[i] * dyn.tens_uu[i];
    }
  }
  q.q_xx = symmetrized(q.q_xx);
  q.q_uu = symmetrized(q.q_uu);
  return q;
}

std::optional<Gains> compute_gains(const QExpansion& q, double regularization, const StepBox* box) {
  const auto l = q.q_u.size();
  const Eigen::MatrixXd h = q.q_uu + regularization * Eigen::MatrixXd::Identity(l, l);

  if (box == nullptr) {
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() != Eigen::Success) return std::nullopt;
    Gains g;
    g.k = -llt.solve(q.q_u);
    g.K = -llt.solve(q.q_ux);
    return g;
  }

  const BoxQpResult qp = solve_box_qp(h, q.q_u, box->lower, box->upper, box->warm_start);
  if (!qp.ok()) return std::nullopt;
  Gains g;
  g.k = qp.minimizer;
  g.K = Eigen::MatrixXd::Zero(l, q.q_ux.cols());
  std::vector<int> free_idx;
  for (int i = 0; i < static_cast<int>(l); ++i) {
    if (qp.free_set[i]) free_idx.push_back(i);
  }
  if (!free_idx.empty()) {
    Eigen::MatrixXd q_ux_free(free_idx.size(), q.q_ux.cols());
    for (std::size_t a = 0; a < free_idx.size(); ++a) q_ux_free.row(a) = q.q_ux.row(free_idx[a]);
    const Eigen::MatrixXd k_free = -qp.free_inverse * q_ux_free;
    for (std::size_t a = 0; a < free_idx.size(); ++a) g.K.row(free_idx[a]) = k_free.row(a);
  }
  return g;
}

TrajectoryExpansion expand(const Trajectory& trajectory, const Dynamics& dynamics,
                           const Objective& objective, bool second_order) {
  const int horizon = trajectory.horizon();
  TrajectoryExpansion e;
  e.stage.reserve(horizon);
  e.dynamics.reserve(horizon);
  for (int t = 0; t < horizon; ++t) {
    const State& x = trajectory.states[t];
    const Control& u = trajectory.controls[t];
    e.stage.push_back(objective.stage_expansion(t, x, u));
    DynamicsExpansion d = dynamics.linearize(x, u);
    if (second_order) dynamics.add_second_order(x, u, d);
    e.dynamics.push_back(std::move(d));
  }
  e.terminal = objective.terminal_expansion(trajectory.terminal());
  return e;
}

BackwardPassResult backward_pass(const Trajectory& trajectory, const TrajectoryExpansion& expansion,
                                 const SolverConfig& config, double regularization) {
  const int horizon = trajectory.horizon();
  require(static_cast<int>(expansion.stage.size()) == horizon &&
              static_cast<int>(expansion.dynamics.size()) == horizon,
          "backward_pass: expansion length does not match the trajectory");

  BackwardPassResult out;
  out.gains.feedforward.resize(horizon);
  out.gains.feedback.resize(horizon);
  out.gains.expected_change.resize(horizon);
  out.values.resize(horizon + 1);

  ValueExpansion value{expansion.terminal.grad_x, symmetrized(expansion.terminal.hess_xx)};
  out.values[horizon] = value;

  const int l = static_cast<int>(trajectory.controls.empty() ? 0 : trajectory.controls[0].size());
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(l);

  for (int t = horizon - 1; t >= 0; --t) {
    const QExpansion q =
        quadratize_q(expansion.stage[t], expansion.dynamics[t], value, config.use_second_order);

    std::optional<Gains> gains;
    if (config.has_box()) {
      const Control& u = trajectory.controls[t];
      StepBox box{*config.control_lower - u, *config.control_upper - u, warm};
      gains = compute_gains(q, regularization, &box);
    } else {
      gains = compute_gains(q, regularization, nullptr);
    }
    if (!gains) {
      out.failed_step = t;
      return out;
    }
    const Eigen::VectorXd& k = gains->k;
    const Eigen::MatrixXd& big_k = gains->K;
    warm = k;

    out.gains.expected_change[t] = Eigen::Vector2d(k.dot(q.q_u), 0.5 * k.dot(q.q_uu * k));

    // Gain form of the value update; reduces to Qx - Qxu Quu^-1 Qu (and the
    // matching Hessian) for unclamped, unregularized gains.
    value.v_x = q.q_x + big_k.transpose() * (q.q_uu * k) + big_k.transpose() * q.q_u +
                q.q_ux.transpose() * k;
    value.v_xx = q.q_xx + big_k.transpose() * q.q_uu * big_k + big_k.transpose() * q.q_ux +
                 q.q_ux.transpose() * big_k;
    value.v_xx = symmetrized(value.v_xx);

    out.gains.feedforward[t] = k;
    out.gains.feedback[t] = big_k;
    out.values[t] = value;
  }
  return out;
}

BackwardPassResult backward_pass(const Trajectory& trajectory, const Dynamics& dynamics,
                                 const Objective& objective, const SolverConfig& config,
                                 double regularization) {
  return backward_pass(trajectory, expand(trajectory, dynamics, objective, config.use_second_order),
                       config, regularization);
}

std::optional<ForwardPassResult> forward_pass(const Trajectory& previous, const GainSchedule& gains,
                                              double step, const Dynamics& dynamics,
                                              const Objective& objective,
                                              const SolverConfig& config) {
  const int horizon = previous.horizon();
  require(gains.horizon() == horizon, "forward_pass: gain schedule length does not match");

  ForwardPassResult out;
  out.trajectory.states.reserve(horizon + 1);
  out.trajectory.controls.reserve(horizon);
  State x = previous.states[0];
  out.trajectory.states.push_back(x);
  double cost = 0.0;
  for (int t = 0; t < horizon; ++t) {
    Control u = previous.controls[t] + step * gains.feedforward[t] +
                gains.feedback[t] * (x - previous.states[t]);
    if (config.has_box()) u = u.cwiseMax(*config.control_lower).cwiseMin(*config.control_upper);
    cost += objective.stage_value(t, x, u);
    x = dynamics.step(x, u);
    if (!x.allFinite()) return std::nullopt;
    out.trajectory.controls.push_back(std::move(u));
    out.trajectory.states.push_back(x);
  }
  cost += objective.terminal_value(x);
  if (!std::isfinite(cost)) return std::nullopt;
  out.cost = cost;
  return out;
}

SolveReport solve(const State& initial_state, const Dynamics& dynamics, Objective& objective,
                  const SolverConfig& config, const IterationObserver& observer) {
  config.validate(dynamics.control_dim());
  if (initial_state.size() != dynamics.state_dim()) {
    throw DimensionError("solve: initial state dimension does not match the dynamics");
  }

  using Clock = std::chrono::steady_clock;
  const auto& sched = config.regularization;

  SolveReport report;
  std::vector<Control> zeros(config.horizon, Control::Zero(dynamics.control_dim()));
  report.trajectory = rollout(initial_state, zeros, dynamics);
  double cost = total_cost(report.trajectory, objective);
  report.cost_history.push_back(cost);
  if (!std::isfinite(cost)) {
    report.message = "initial rollout is not finite";
    return report;
  }

  double lambda = sched.initial;
  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    const auto start = Clock::now();
    report.iterations = iter;

    objective.prepare(report.trajectory);
    const TrajectoryExpansion expansion =
        expand(report.trajectory, dynamics, objective, config.use_second_order);

    BackwardPassResult backward;
    bool backward_ok = false;
    while (true) {
      backward = backward_pass(report.trajectory, expansion, config, lambda);
      if (backward.ok()) {
        backward_ok = true;
        break;
      }
      if (lambda >= sched.max) break;
      lambda = std::min(sched.max, lambda * sched.increase);
    }
    if (!backward_ok) {
      std::ostringstream msg;
      msg << "backward pass failed at step " << *backward.failed_step
          << " with maximum regularization";
      report.message = msg.str();
      report.iteration_seconds.push_back(std::chrono::duration<double>(Clock::now() - start).count());
      break;
    }

    bool accepted = false;
    double accepted_step = 0.0;
    for (double step : config.line_search) {
      auto trial = forward_pass(report.trajectory, backward.gains, step, dynamics, objective, config);
      if (trial && trial->cost < cost) {
        const double change = cost - trial->cost;
        report.trajectory = std::move(trial->trajectory);
        cost = trial->cost;
        report.cost_history.push_back(cost);
        accepted = true;
        accepted_step = step;
        if (change < config.cost_tolerance) report.converged = true;
        break;
      }
    }
    report.gains = backward.gains;
    report.iteration_seconds.push_back(std::chrono::duration<double>(Clock::now() - start).count());

    if (observer) {
      observer(IterationEvent{iter, accepted, cost, accepted_step, lambda, &report.trajectory});
    }

    if (accepted) {
      lambda = std::max(sched.min, lambda * sched.decrease);
      if (report.converged) {
        report.message = "cost change below tolerance";
        break;
      }
      continue;
    }

    // No decrease found. If the model predicts none either, the nominal is stationary.
    if (-backward.gains.predicted_change(1.0) < config.cost_tolerance) {
      report.converged = true;
      report.message = "predicted improvement below tolerance";
      break;
    }
    if (lambda >= sched.max) {
      report.message = "line search failed with maximum regularization";
      break;
    }
    lambda = std::min(sched.max, lambda * sched.increase);
  }
  if (!report.converged && report.message.empty()) report.message = "maximum iterations reached";
  report.final_regularization = lambda;
  return report;
}

}  // namespace etsddp
