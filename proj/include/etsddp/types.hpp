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

#ifndef ETSDDP_TYPES_HPP_
#define ETSDDP_TYPES_HPP_

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace etsddp {

using State = Eigen::VectorXd;
using Control = Eigen::VectorXd;

/// Raised for inconsistent vector/matrix shapes passed across module boundaries.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a configuration document or struct fails validation. The
/// message always names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, std::string detail)
      : std::invalid_argument(field + ": " + detail), field_(std::move(field)),
        detail_(std::move(detail)) {}
  const std::string& field() const noexcept { return field_; }
  /// The message without the field prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string field_;
  std::string detail_;
};

/// Time-indexed rollout. states has one more entry than controls.
struct Trajectory {
  std::vector<State> states;
  std::vector<Control> controls;

  int horizon() const { return static_cast<int>(controls.size()); }
  const State& terminal() const { return states.back(); }
};

/// Second-order Taylor data of a scalar cost around (x, u).
struct CostExpansion {
  double value = 0.0;
  Eigen::VectorXd grad_x;
  Eigen::VectorXd grad_u;
  Eigen::MatrixXd hess_xx;
  Eigen::MatrixXd hess_ux;  // l x n
  Eigen::MatrixXd hess_uu;

  static CostExpansion zero(int n, int l) {
    CostExpansion e;
    e.grad_x = Eigen::VectorXd::Zero(n);
    e.grad_u = Eigen::VectorXd::Zero(l);
    e.hess_xx = Eigen::MatrixXd::Zero(n, n);
    e.hess_ux = Eigen::MatrixXd::Zero(l, n);
    e.hess_uu = Eigen::MatrixXd::Zero(l, l);
    return e;
  }
};

/// Linearization of the step map. The optional second-order tensors are
/// stored slice-wise: entry i holds the Hessian of output component i.
struct DynamicsExpansion {
  State next;
  Eigen::MatrixXd jac_x;  // n x n
  Eigen::MatrixXd jac_u;  // n x l
  std::vector<Eigen::MatrixXd> tens_xx;  // n slices of n x n
  std::vector<Eigen::MatrixXd> tens_ux;  // n slices of l x n
  std::vector<Eigen::MatrixXd> tens_uu;  // n slices of l x l

  bool has_second_order() const { return !tens_xx.empty(); }
};

struct QExpansion {
  Eigen::VectorXd q_x;
  Eigen::VectorXd q_u;
  Eigen::MatrixXd q_xx;
  Eigen::MatrixXd q_ux;
  Eigen::MatrixXd q_uu;
};

struct ValueExpansion {
  Eigen::VectorXd v_x;
  Eigen::MatrixXd v_xx;
};

struct GainSchedule {
  std::vector<Eigen::VectorXd> feedforward;  // k_t
  std::vector<Eigen::MatrixXd> feedback;     // K_t
  // Expected cost change of a full step, split as (k'Qu, 0.5 k'Quu k) per step.
  std::vector<Eigen::Vector2d> expected_change;

  int horizon() const { return static_cast<int>(feedforward.size()); }

  /// Predicted cost change of a forward pass with the given step size.
  double predicted_change(double step) const {
    double linear = 0.0, quadratic = 0.0;
    for (const auto& dv : expected_change) {
      linear += dv[0];
      quadratic += dv[1];
    }
    return step * linear + step * step * quadratic;
  }
};

/// Levenberg-Marquardt schedule for the scalar added to q_uu.
struct RegularizationSchedule {
  double initial = 1e-6;
  double min = 1e-9;
  double max = 1e10;
  double decrease = 0.5;
  double increase = 4.0;
};

struct SolverConfig {
  int horizon = 500;
  int max_iterations = 500;
  double cost_tolerance = 1e-7;
  RegularizationSchedule regularization;
  std::vector<double> line_search{1.0, 0.7, 0.5, 0.3, 0.1, 0.03, 0.01};
  bool use_second_order = false;
  std::optional<Eigen::VectorXd> control_lower;
  std::optional<Eigen::VectorXd> control_upper;

  bool has_box() const { return control_lower.has_value(); }

  /// Throws ConfigError naming the first invalid field.
  void validate(int control_dim) const;
};

struct SolveReport {
  Trajectory trajectory;
  // Entry 0 is the cost of the initial rollout; one entry per accepted iteration follows.
  std::vector<double> cost_history;
  int iterations = 0;
  bool converged = false;
  std::vector<double> iteration_seconds;
  GainSchedule gains;
  double final_regularization = 0.0;
  std::string message;
  // Filled by target-aware drivers: the common point-target metric at the
  // initial rollout and each accepted iterate, and the terminal Mahalanobis
  // distance to the target set.
  std::vector<double> comparison_history;
  std::optional<double> terminal_mahalanobis;

  double final_cost() const { return cost_history.empty() ? 0.0 : cost_history.back(); }
  double mean_iteration_seconds() const;
  double total_seconds() const;
};

}  // namespace etsddp

#endif  // ETSDDP_TYPES_HPP_
