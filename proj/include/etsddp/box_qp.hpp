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

#ifndef ETSDDP_BOX_QP_HPP_
#define ETSDDP_BOX_QP_HPP_

#include <Eigen/Dense>

#include <vector>

namespace etsddp {

enum class BoxQpStatus {
  Indefinite,        // free block of the Hessian is not positive definite
  MaxIterations,
  NoDescent,
  StepTooSmall,
  SmallImprovement,
  SmallGradient,
  AllClamped,
};

const char* to_string(BoxQpStatus status);

struct BoxQpOptions {
  int max_iterations = 100;
  double min_gradient = 1e-8;
  double min_relative_improvement = 1e-8;
  double step_decrease = 0.6;
  double min_step = 1e-22;
  double armijo = 0.1;
};

struct BoxQpResult {
  Eigen::VectorXd minimizer;
  std::vector<bool> free_set;  // true where the coordinate is not clamped
  Eigen::MatrixXd free_inverse;  // inverse of H restricted to the free set
  BoxQpStatus status = BoxQpStatus::MaxIterations;
  int iterations = 0;

  bool ok() const { return status != BoxQpStatus::Indefinite; }
  int free_count() const;
};

/// Minimizes 0.5 u'Hu + g'u subject to lower <= u <= upper with a projected
/// Newton method. The active set is the set of coordinates sitting on a bound
/// with the gradient pushing outward; the Newton step is taken on the rest,
/// followed by an Armijo backtracking search along the projected arc.
BoxQpResult solve_box_qp(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& gradient,
                         const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                         const Eigen::VectorXd& start, const BoxQpOptions& options = {});

}  // namespace etsddp

#endif  // ETSDDP_BOX_QP_HPP_
