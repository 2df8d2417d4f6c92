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

#include "etsddp/vehicle.hpp"

#include <cmath>
#include <stdexcept>

namespace etsddp::vehicle {

namespace {

void check_shapes(const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  if (x.size() != kStateDim || u.size() != kControlDim) {
    throw DimensionError("vehicle: state must have 4 entries and control 2");
  }
}

// Shared intermediate quantities of the step map.
struct StepTerms {
  double f, s, c, root, b, q, den;
};

StepTerms step_terms(double v, double omega, const CarParams& p) {
  StepTerms t{};
  t.f = p.time_step * v;
  t.s = std::sin(omega);
  t.c = std::cos(omega);
  t.q = t.f * t.s / p.wheelbase;
  if (!(std::abs(t.q) <= 1.0)) {
    throw std::domain_error("vehicle::step: |Delta sin(omega) v / d| exceeds 1");
  }
  t.root = std::sqrt(p.wheelbase * p.wheelbase - (t.f * t.s) * (t.f * t.s));
  t.b = p.wheelbase + t.f * t.c - t.root;
  t.den = std::sqrt(1.0 - t.q * t.q);
  return t;
}

}  // namespace

void CarParams::validate() const {
  if (!(wheelbase > 0)) throw ConfigError("car.wheelbase", "must be positive");
  if (!(time_step > 0)) throw ConfigError("car.time_step", "must be positive");
  if (!(q1 >= 0)) throw ConfigError("car.q1", "must be nonnegative");
  if (!(q2 >= 0)) throw ConfigError("car.q2", "must be nonnegative");
  if (!(r1 >= 0)) throw ConfigError("car.r1", "must be nonnegative");
  if (!(r2 >= 0)) throw ConfigError("car.r2", "must be nonnegative");
  for (double m : mu) {
    if (!(m > 0)) throw ConfigError("car.mu", "all Huber scales must be positive");
  }
}

Eigen::Vector2d default_control_lower() { return {-0.5, -2.0}; }
Eigen::Vector2d default_control_upper() { return {0.5, 2.0}; }

double rolling_distance(double v, double omega, const CarParams& p) {
  return step_terms(v, omega, p).b;
}

State step(const State& x, const Control& u, const CarParams& p) {
  check_shapes(x, u);
  const StepTerms t = step_terms(x[kV], u[kOmega], p);
  State next(kStateDim);
  next[kPx] = x[kPx] + t.b * std::cos(x[kTheta]);
  next[kPy] = x[kPy] + t.b * std::sin(x[kTheta]);
  next[kTheta] = x[kTheta] + std::asin(t.q);
  next[kV] = x[kV] + p.time_step * u[kAccel];
  return next;
}

StepJacobians step_jacobians(const State& x, const Control& u, const CarParams& p) {
  check_shapes(x, u);
  const StepTerms t = step_terms(x[kV], u[kOmega], p);
  const double h = p.time_step;
  const double d = p.wheelbase;
  const double cos_th = std::cos(x[kTheta]);
  const double sin_th = std::sin(x[kTheta]);

  const double b_v = h * t.c + h * t.f * t.s * t.s / t.root;
  const double b_w = -t.f * t.s + t.f * t.f * t.s * t.c / t.root;
  const double dth_v = (h * t.s / d) / t.den;
  const double dth_w = (t.f * t.c / d) / t.den;

  StepJacobians j;
  j.jac_x.setIdentity();
  j.jac_x(kPx, kTheta) = -t.b * sin_th;
  j.jac_x(kPx, kV) = b_v * cos_th;
  j.jac_x(kPy, kTheta) = t.b * cos_th;
  j.jac_x(kPy, kV) = b_v * sin_th;
  j.jac_x(kTheta, kV) = dth_v;

  j.jac_u.setZero();
  j.jac_u(kPx, kOmega) = b_w * cos_th;
  j.jac_u(kPy, kOmega) = b_w * sin_th;
  j.jac_u(kTheta, kOmega) = dth_w;
  j.jac_u(kV, kAccel) = h;
  return j;
}

double huber(double z, double mu) { return std::sqrt(z * z + mu * mu) - mu; }

double huber_d1(double z, double mu) { return z / std::sqrt(z * z + mu * mu); }

double huber_d2(double z, double mu) {
  const double s = z * z + mu * mu;
  return mu * mu / (s * std::sqrt(s));
}

CostExpansion stage_cost(const Eigen::VectorXd& offset, const Control& u, const CarParams& p) {
  check_shapes(offset, u);
  CostExpansion e = CostExpansion::zero(kStateDim, kControlDim);
  const double px = offset[kPx], py = offset[kPy];
  const double w = u[kOmega], a = u[kAccel];
  const double mu1 = p.mu[0], mu2 = p.mu[1];

  e.value = p.q1 * huber(px, mu1) + p.q2 * huber(py, mu2) + p.r1 * w * w + p.r2 * a * a;
  e.grad_x[kPx] = p.q1 * huber_d1(px, mu1);
  e.grad_x[kPy] = p.q2 * huber_d1(py, mu2);
  e.hess_xx(kPx, kPx) = p.q1 * huber_d2(px, mu1);
  e.hess_xx(kPy, kPy) = p.q2 * huber_d2(py, mu2);
  e.grad_u[kOmega] = 2.0 * p.r1 * w;
  e.grad_u[kAccel] = 2.0 * p.r2 * a;
  e.hess_uu(kOmega, kOmega) = 2.0 * p.r1;
  e.hess_uu(kAccel, kAccel) = 2.0 * p.r2;
  return e;
}

CostExpansion terminal_cost(const Eigen::VectorXd& offset, const CarParams& p) {
  if (offset.size() != kStateDim) throw DimensionError("vehicle: offset must have 4 entries");
  CostExpansion e = CostExpansion::zero(kStateDim, kControlDim);
  for (int i = 0; i < kStateDim; ++i) {
    e.value += huber(offset[i], p.mu[i]);
    e.grad_x[i] = huber_d1(offset[i], p.mu[i]);
    e.hess_xx(i, i) = huber_d2(offset[i], p.mu[i]);
  }
  return e;
}

State CarDynamics::step(const State& x, const Control& u) const {
  return vehicle::step(x, u, params_);
}

DynamicsExpansion CarDynamics::linearize(const State& x, const Control& u) const {
  const StepJacobians j = step_jacobians(x, u, params_);
  DynamicsExpansion e;
  e.next = vehicle::step(x, u, params_);
  e.jac_x = j.jac_x;
  e.jac_u = j.jac_u;
  return e;
}

double ParkingCost::stage_value(const Eigen::VectorXd& offset, const Control& u) const {
  check_shapes(offset, u);
  return params_.q1 * huber(offset[kPx], params_.mu[0]) +
         params_.q2 * huber(offset[kPy], params_.mu[1]) +
         params_.r1 * u[kOmega] * u[kOmega] + params_.r2 * u[kAccel] * u[kAccel];
}

double ParkingCost::terminal_value(const Eigen::VectorXd& offset) const {
  if (offset.size() != kStateDim) throw DimensionError("vehicle: offset must have 4 entries");
  double total = 0.0;
  for (int i = 0; i < kStateDim; ++i) total += huber(offset[i], params_.mu[i]);
  return total;
}

CostExpansion ParkingCost::stage_expansion(const Eigen::VectorXd& offset, const Control& u) const {
  return stage_cost(offset, u, params_);
}

CostExpansion ParkingCost::terminal_expansion(const Eigen::VectorXd& offset) const {
  return terminal_cost(offset, params_);
}

}  // namespace etsddp::vehicle
