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

#include "etsddp/lqr.hpp"

namespace etsddp {

LqrSolution lqr_oracle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                       const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                       const Eigen::MatrixXd& qf, int horizon, const State& x0) {
  const auto n = a.rows();
  const auto l = b.cols();
  if (a.cols() != n || b.rows() != n || q.rows() != n || q.cols() != n || qf.rows() != n ||
      qf.cols() != n || r.rows() != l || r.cols() != l || x0.size() != n) {
    throw DimensionError("lqr_oracle: inconsistent dimensions");
  }
  if (horizon < 1) throw std::invalid_argument("lqr_oracle: horizon must be at least 1");
  if (!Eigen::FullPivLU<Eigen::MatrixXd>(r).isInvertible()) {
    throw std::invalid_argument("lqr_oracle: control weight R is singular");
  }

  LqrSolution sol;
  sol.gains.resize(horizon);
  Eigen::MatrixXd p = qf;
  for (int t = horizon - 1; t >= 0; --t) {
    const Eigen::MatrixXd s = r + b.transpose() * p * b;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
    if (!lu.isInvertible()) {
      throw std::invalid_argument("lqr_oracle: R + B'PB is singular");
    }
    const Eigen::MatrixXd k = -lu.solve(b.transpose() * p * a);
    p = q + a.transpose() * p * a + a.transpose() * p * b * k;
    p = 0.5 * (p + p.transpose()).eval();
    sol.gains[t] = k;
  }

  sol.trajectory.states.push_back(x0);
  double cost = 0.0;
  for (int t = 0; t < horizon; ++t) {
    const State& x = sol.trajectory.states.back();
    Control u = sol.gains[t] * x;
    cost += x.dot(q * x) + u.dot(r * u);
    State next = a * x + b * u;
    sol.trajectory.controls.push_back(std::move(u));
    sol.trajectory.states.push_back(std::move(next));
  }
  cost += sol.trajectory.terminal().dot(qf * sol.trajectory.terminal());
  sol.cost = cost;
  return sol;
}

}  // namespace etsddp
