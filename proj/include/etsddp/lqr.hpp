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

#ifndef ETSDDP_LQR_HPP_
#define ETSDDP_LQR_HPP_

#include "etsddp/types.hpp"

namespace etsddp {

struct LqrSolution {
  Trajectory trajectory;
  std::vector<Eigen::MatrixXd> gains;  // u_t = K_t x_t
  double cost = 0.0;
};

// Finite-horizon discrete LQR for cost sum x'Qx + u'Ru + x_T'Qf x_T by the
// backward Riccati recursion. Throws std::invalid_argument if R + B'PB is
// singular at any step.
LqrSolution lqr_oracle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                       const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                       const Eigen::MatrixXd& qf, int horizon, const State& x0);

}  // namespace etsddp

#endif  // ETSDDP_LQR_HPP_
