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

#include "etsddp/box_qp.hpp"

#include "etsddp/types.hpp"

#include <algorithm>
#include <cmath>

namespace etsddp {

namespace {

Eigen::VectorXd clamp(const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                      const Eigen::VectorXd& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

double quadratic(const Eigen::MatrixXd& h, const Eigen::VectorXd& g, const Eigen::VectorXd& x) {
  return x.dot(g) + 0.5 * x.dot(h * x);
}

std::vector<int> indices_where(const std::vector<bool>& mask, bool value) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(mask.size()); ++i) {
    if (mask[i] == value) out.push_back(i);
  }
  return out;
}

}  // namespace

const char* to_string(BoxQpStatus status) {
  switch (status) {
    case BoxQpStatus::Indefinite: return "hessian not positive definite, increase regularization";
    case BoxQpStatus::MaxIterations: return "maximum iterations reached";
    case BoxQpStatus::NoDescent: return "no descent direction";
    case BoxQpStatus::StepTooSmall: return "line search step too small";
    case BoxQpStatus::SmallImprovement: return "relative improvement below tolerance";
    case BoxQpStatus::SmallGradient: return "free gradient below tolerance";
    case BoxQpStatus::AllClamped: return "all coordinates clamped";
  }
  return "unknown";
}

int BoxQpResult::free_count() const {
  return static_cast<int>(std::count(free_set.begin(), free_set.end(), true));
}

BoxQpResult solve_box_qp(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& gradient,
                         const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                         const Eigen::VectorXd& start, const BoxQpOptions& options) {
  const int n = static_cast<int>(gradient.size());
  if (hessian.rows() != n || hessian.cols() != n || lower.size() != n || upper.size() != n ||
      start.size() != n) {
    throw DimensionError("solve_box_qp: inconsistent dimensions");
  }
  if ((lower.array() >= upper.array()).any()) {
    throw std::invalid_argument("solve_box_qp: lower must be strictly below upper");
  }

  BoxQpResult result;
  Eigen::VectorXd x = clamp(start, lower, upper);
  double value = quadratic(hessian, gradient, x);

  std::vector<bool> clamped(n, false);
  std::vector<bool> old_clamped(n, false);
  Eigen::LLT<Eigen::MatrixXd> free_factor;
  std::vector<int> free_idx;
  double old_value = 0.0;
  bool done = false;
  result.status = BoxQpStatus::MaxIterations;

  for (int iter = 1; iter <= options.max_iterations && !done; ++iter) {
    result.iterations = iter;
    if (iter > 1 && (old_value - value) < options.min_relative_improvement * std::abs(old_value)) {
      result.status = BoxQpStatus::SmallImprovement;
      break;
    }
    old_value = value;

    const Eigen::VectorXd grad = gradient + hessian * x;
    old_clamped = clamped;
    for (int i = 0; i < n; ++i) {
      clamped[i] = (x[i] == lower[i] && grad[i] > 0) || (x[i] == upper[i] && grad[i] < 0);
    }
    if (std::all_of(clamped.begin(), clamped.end(), [](bool c) { return c; })) {
      result.status = BoxQpStatus::AllClamped;
      break;
    }

    if (iter == 1 || clamped != old_clamped) {
      free_idx = indices_where(clamped, false);
      Eigen::MatrixXd h_free(free_idx.size(), free_idx.size());
      for (std::size_t a = 0; a < free_idx.size(); ++a) {
        for (std::size_t b = 0; b < free_idx.size(); ++b) {
          h_free(a, b) = hessian(free_idx[a], free_idx[b]);
        }
      }
      free_factor.compute(h_free);
      if (free_factor.info() != Eigen::Success) {
        result.status = BoxQpStatus::Indefinite;
        result.minimizer = x;
        result.free_set.assign(n, false);
        return result;
      }
    }

    double free_grad_norm2 = 0.0;
    for (int i : free_idx) free_grad_norm2 += grad[i] * grad[i];
    if (std::sqrt(free_grad_norm2) < options.min_gradient) {
      result.status = BoxQpStatus::SmallGradient;
      break;
    }

    // Newton step on the free block, holding clamped coordinates fixed.
    Eigen::VectorXd x_clamped = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (clamped[i]) x_clamped[i] = x[i];
    }
    const Eigen::VectorXd grad_clamped = gradient + hessian * x_clamped;
    Eigen::VectorXd rhs(free_idx.size());
    for (std::size_t a = 0; a < free_idx.size(); ++a) rhs[a] = grad_clamped[free_idx[a]];
    const Eigen::VectorXd newton = free_factor.solve(rhs);
    Eigen::VectorXd search = Eigen::VectorXd::Zero(n);
    for (std::size_t a = 0; a < free_idx.size(); ++a) {
      search[free_idx[a]] = -newton[a] - x[free_idx[a]];
    }

    const double sdotg = search.dot(grad);
    if (sdotg >= 0) {
      result.status = BoxQpStatus::NoDescent;
      break;
    }

    double step = 1.0;
    Eigen::VectorXd candidate = clamp(x + step * search, lower, upper);
    double candidate_value = quadratic(hessian, gradient, candidate);
    while ((candidate_value - value) / (step * sdotg) < options.armijo) {
      step *= options.step_decrease;
      candidate = clamp(x + step * search, lower, upper);
      candidate_value = quadratic(hessian, gradient, candidate);
      if (step < options.min_step) {
        result.status = BoxQpStatus::StepTooSmall;
        done = true;
        break;
      }
    }
    x = candidate;
    value = candidate_value;
  }

  result.minimizer = x;
  result.free_set.resize(n);
  for (int i = 0; i < n; ++i) result.free_set[i] = !clamped[i];
  // The factorization may be stale if the loop exited right after a clamp
  // change, so rebuild the free-block inverse from the final free set.
  const std::vector<int> final_free = indices_where(result.free_set, true);
  const int nf = static_cast<int>(final_free.size());
  Eigen::MatrixXd h_free(nf, nf);
  for (int a = 0; a < nf; ++a) {
    for (int b = 0; b < nf; ++b) h_free(a, b) = hessian(final_free[a], final_free[b]);
  }
  if (nf > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(h_free);
    if (llt.info() != Eigen::Success) {
      result.status = BoxQpStatus::Indefinite;
      return result;
    }
    result.free_inverse = llt.solve(Eigen::MatrixXd::Identity(nf, nf));
  } else {
    result.free_inverse.resize(0, 0);
  }
  return result;
}

}  // namespace etsddp
