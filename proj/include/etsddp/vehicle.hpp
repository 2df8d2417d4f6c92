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

#ifndef ETSDDP_VEHICLE_HPP_
#define ETSDDP_VEHICLE_HPP_

#include "etsddp/model.hpp"
#include "etsddp/types.hpp"

#include <array>

namespace etsddp::vehicle {

// State layout (px, py, theta, v); control layout (omega, a).
enum StateIndex { kPx = 0, kPy = 1, kTheta = 2, kV = 3 };
enum ControlIndex { kOmega = 0, kAccel = 1 };
inline constexpr int kStateDim = 4;
inline constexpr int kControlDim = 2;

struct CarParams {
  double wheelbase = 2.0;   // d [m]
  double time_step = 0.03;  // Delta [s]
  double q1 = 0.01;
  double q2 = 0.01;
  double r1 = 0.01;
  double r2 = 0.0001;
  std::array<double, 4> mu{0.1, 0.1, 0.01, 1.0};

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Box used by the parking benchmark: omega in [-0.5, 0.5], a in [-2, 2].
Eigen::Vector2d default_control_lower();
Eigen::Vector2d default_control_upper();

/// Rolling distance of the rear axle, b = d + f cos(w) - sqrt(d^2 - (f sin(w))^2)
/// with f = Delta v.
double rolling_distance(double v, double omega, const CarParams& p);

/// One step of the kinematic car. Throws std::domain_error if the heading
/// update leaves the asin domain.
State step(const State& x, const Control& u, const CarParams& p);

struct StepJacobians {
  Eigen::Matrix4d jac_x;
  Eigen::Matrix<double, 4, 2> jac_u;
};

StepJacobians step_jacobians(const State& x, const Control& u, const CarParams& p);

/// h_mu(z) = sqrt(z^2 + mu^2) - mu and its first two derivatives.
double huber(double z, double mu);
double huber_d1(double z, double mu);
double huber_d2(double z, double mu);

/// q1 h(px) + q2 h(py) + r1 omega^2 + r2 a^2.
CostExpansion stage_cost(const Eigen::VectorXd& offset, const Control& u, const CarParams& p);

/// h(px) + h(py) + h(theta) + h(v) with scales mu1..mu4.
CostExpansion terminal_cost(const Eigen::VectorXd& offset, const CarParams& p);

class CarDynamics final : public Dynamics {
 public:
  explicit CarDynamics(CarParams params = {}) : params_(params) { params_.validate(); }

  int state_dim() const override { return kStateDim; }
  int control_dim() const override { return kControlDim; }
  State step(const State& x, const Control& u) const override;
  DynamicsExpansion linearize(const State& x, const Control& u) const override;

  const CarParams& params() const { return params_; }

 private:
  CarParams params_;
};

class ParkingCost final : public OffsetCost {
 public:
  explicit ParkingCost(CarParams params = {}) : params_(params) { params_.validate(); }

  int state_dim() const override { return kStateDim; }
  int control_dim() const override { return kControlDim; }
  double stage_value(const Eigen::VectorXd& offset, const Control& u) const override;
  double terminal_value(const Eigen::VectorXd& offset) const override;
  CostExpansion stage_expansion(const Eigen::VectorXd& offset, const Control& u) const override;
  CostExpansion terminal_expansion(const Eigen::VectorXd& offset) const override;

 private:
  CarParams params_;
};

}  // namespace etsddp::vehicle

#endif  // ETSDDP_VEHICLE_HPP_
