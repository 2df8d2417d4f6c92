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
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace etsddp::vehicle {
namespace {

using etsddp::testing::fd_gradient;
using etsddp::testing::fd_jacobian;
using etsddp::testing::rel_error;

struct RandomPoint {
  Eigen::Vector4d x;
  Eigen::Vector2d u;
};

RandomPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-4, 4), th(-2 * std::numbers::pi, 2 * std::numbers::pi),
      vel(-3, 3), om(-0.5, 0.5), acc(-2, 2);
  return {Eigen::Vector4d(pos(rng), pos(rng), th(rng), vel(rng)), Eigen::Vector2d(om(rng), acc(rng))};
}

TEST(CarStep, StraightLineWithZeroSteering) {
  const CarParams p;
  const Eigen::Vector4d x(1.0, -1.0, 0.3, 2.0);
  const State next = step(x, Eigen::Vector2d(0.0, 1.0), p);
  const double f = p.time_step * 2.0;
  EXPECT_NEAR(rolling_distance(2.0, 0.0, p), f, 1e-15);
  EXPECT_NEAR(next[kPx], 1.0 + f * std::cos(0.3), 1e-15);
  EXPECT_NEAR(next[kPy], -1.0 + f * std::sin(0.3), 1e-15);
  EXPECT_DOUBLE_EQ(next[kTheta], 0.3);
  EXPECT_DOUBLE_EQ(next[kV], 2.0 + p.time_step);
}

TEST(CarStep, AtRestOnlyVelocityChanges) {
  const CarParams p;
  const Eigen::Vector4d x(3.0, 3.0, 1.5 * std::numbers::pi, 0.0);
  const State next = step(x, Eigen::Vector2d(0.4, -2.0), p);
  EXPECT_EQ(next.head<3>(), x.head<3>());
  EXPECT_DOUBLE_EQ(next[kV], -2.0 * p.time_step);
}

TEST(CarStep, HeadingUpdateAndRollingDistance) {
  const CarParams p;
  const double v = 1.5, w = 0.3;
  const double f = p.time_step * v;
  const double b = p.wheelbase + f * std::cos(w) -
                   std::sqrt(p.wheelbase * p.wheelbase - f * f * std::sin(w) * std::sin(w));
  EXPECT_NEAR(rolling_distance(v, w, p), b, 1e-15);
  const State next = step(Eigen::Vector4d(0, 0, 0.2, v), Eigen::Vector2d(w, 0), p);
  EXPECT_NEAR(next[kTheta], 0.2 + std::asin(f * std::sin(w) / p.wheelbase), 1e-15);
  EXPECT_NEAR(next[kPx], b * std::cos(0.2), 1e-15);
}

TEST(CarStep, OutsideArcsineDomainThrows) {
  EXPECT_THROW(step(Eigen::Vector4d(0, 0, 0, 100.0), Eigen::Vector2d(1.5, 0), CarParams{}),
               std::domain_error);
}

TEST(CarStep, RejectsWrongShapes) {
  EXPECT_THROW(step(Eigen::Vector3d::Zero(), Eigen::Vector2d::Zero(), CarParams{}), DimensionError);
}

TEST(CarJacobians, MatchFiniteDifferences) {
  std::mt19937_64 rng(101);
  const CarParams p;
  for (int i = 0; i < 200; ++i) {
    const RandomPoint pt = random_point(rng);
    const StepJacobians j = step_jacobians(pt.x, pt.u, p);
    const Eigen::MatrixXd fx =
        fd_jacobian([&](const Eigen::VectorXd& x) { return step(x, pt.u, p); }, pt.x);
    const Eigen::MatrixXd fu =
        fd_jacobian([&](const Eigen::VectorXd& u) { return step(pt.x, u, p); }, pt.u);
    EXPECT_LT(rel_error(j.jac_x, fx), 1e-4) << "i=" << i;
    EXPECT_LT(rel_error(j.jac_u, fu), 1e-4) << "i=" << i;
  }
}

TEST(CarJacobians, SecondOrderTensorsMatchSecondDifferences) {
  std::mt19937_64 rng(202);
  const CarDynamics dyn;
  for (int i = 0; i < 20; ++i) {
    const RandomPoint pt = random_point(rng);
    DynamicsExpansion e = dyn.linearize(pt.x, pt.u);
    dyn.add_second_order(pt.x, pt.u, e);
    ASSERT_EQ(e.tens_xx.size(), 4u);
    for (int out = 0; out < 4; ++out) {
      auto component = [&](const Eigen::VectorXd& z) {
        return dyn.step(z.head<4>(), z.tail<2>())[out];
      };
      Eigen::VectorXd z(6);
      z << pt.x, pt.u;
      // Hessian of one output by second differences of the scalar map.
      Eigen::MatrixXd hess(6, 6);
      const double h = 1e-4;
      for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
          Eigen::VectorXd pp = z, pm = z, mp = z, mm = z;
          pp[a] += h; pp[b] += h;
          pm[a] += h; pm[b] -= h;
          mp[a] -= h; mp[b] += h;
          mm[a] -= h; mm[b] -= h;
          hess(a, b) = (component(pp) - component(pm) - component(mp) + component(mm)) / (4 * h * h);
        }
      }
      EXPECT_LT((e.tens_xx[out] - hess.topLeftCorner(4, 4)).cwiseAbs().maxCoeff(), 1e-4);
      EXPECT_LT((e.tens_ux[out] - hess.bottomLeftCorner(2, 4)).cwiseAbs().maxCoeff(), 1e-4);
      EXPECT_LT((e.tens_uu[out] - hess.bottomRightCorner(2, 2)).cwiseAbs().maxCoeff(), 1e-4);
    }
  }
}

TEST(Huber, ValuesAndDerivatives) {
  EXPECT_EQ(huber(0.0, 0.1), 0.0);
  EXPECT_NEAR(huber(3.0, 4.0), 1.0, 1e-15);
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> z(-5, 5), mu(0.005, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double zi = z(rng), mi = mu(rng), h = 1e-6 * std::max(1.0, std::abs(zi));
    const double d1 = (huber(zi + h, mi) - huber(zi - h, mi)) / (2 * h);
    const double d2 = (huber_d1(zi + h, mi) - huber_d1(zi - h, mi)) / (2 * h);
    EXPECT_NEAR(huber_d1(zi, mi), d1, 1e-4 * std::max(1e-3, std::abs(d1)));
    EXPECT_NEAR(huber_d2(zi, mi), d2, 1e-4 * std::max(1e-3, std::abs(d2)));
  }
}

TEST(ParkingCost, ExpansionsMatchFiniteDifferences) {
  std::mt19937_64 rng(404);
  const CarParams p;
  const ParkingCost cost(p);
  for (int i = 0; i < 200; ++i) {
    const RandomPoint pt = random_point(rng);
    const CostExpansion s = cost.stage_expansion(pt.x, pt.u);
    EXPECT_DOUBLE_EQ(s.value, cost.stage_value(pt.x, pt.u));
    const Eigen::VectorXd gx =
        fd_gradient([&](const Eigen::VectorXd& x) { return cost.stage_value(x, pt.u); }, pt.x);
    const Eigen::VectorXd gu =
        fd_gradient([&](const Eigen::VectorXd& u) { return cost.stage_value(pt.x, u); }, pt.u);
    EXPECT_LT(rel_error(s.grad_x, gx), 1e-4);
    EXPECT_LT(rel_error(s.grad_u, gu), 1e-4);
    const Eigen::MatrixXd hxx = fd_jacobian(
        [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(cost.stage_expansion(x, pt.u).grad_x); }, pt.x);
    const Eigen::MatrixXd huu = fd_jacobian(
        [&](const Eigen::VectorXd& u) { return Eigen::VectorXd(cost.stage_expansion(pt.x, u).grad_u); }, pt.u);
    EXPECT_LT(rel_error(s.hess_xx, hxx), 1e-4);
    EXPECT_LT(rel_error(s.hess_uu, huu), 1e-4);
    EXPECT_EQ(s.hess_ux.norm(), 0.0);

    const CostExpansion t = cost.terminal_expansion(pt.x);
    EXPECT_DOUBLE_EQ(t.value, cost.terminal_value(pt.x));
    const Eigen::VectorXd tg =
        fd_gradient([&](const Eigen::VectorXd& x) { return cost.terminal_value(x); }, pt.x);
    EXPECT_LT(rel_error(t.grad_x, tg), 1e-4);
    const Eigen::MatrixXd th = fd_jacobian(
        [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(cost.terminal_expansion(x).grad_x); }, pt.x);
    EXPECT_LT(rel_error(t.hess_xx, th), 1e-4);
  }
}

TEST(ParkingCost, WeightsEnterAsSpecified) {
  const CarParams p;
  const ParkingCost cost(p);
  const Eigen::Vector4d a(1.0, -2.0, 0.5, 0.3);
  const Eigen::Vector2d u(0.2, -1.0);
  const double expected = p.q1 * (std::sqrt(1 + 0.01) - 0.1) + p.q2 * (std::sqrt(4 + 0.01) - 0.1) +
                          p.r1 * 0.04 + p.r2 * 1.0;
  EXPECT_NEAR(cost.stage_value(a, u), expected, 1e-15);
  const double terminal = (std::sqrt(1 + 0.01) - 0.1) + (std::sqrt(4 + 0.01) - 0.1) +
                          (std::sqrt(0.25 + 1e-4) - 0.01) + (std::sqrt(0.09 + 1) - 1);
  EXPECT_NEAR(cost.terminal_value(a), terminal, 1e-15);
}

TEST(CarParams, ValidationNamesTheField) {
  CarParams p;
  p.wheelbase = 0;
  try {
    p.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "car.wheelbase");
  }
  p = {};
  p.mu[2] = -1;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.r2 = -1;
  EXPECT_THROW(ParkingCost{p}, ConfigError);
}

}  // namespace
}  // namespace etsddp::vehicle
