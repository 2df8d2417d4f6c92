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

#ifndef ETSDDP_CHI2_HPP_
#define ETSDDP_CHI2_HPP_

namespace etsddp {

/// Regularized lower incomplete gamma P(a, z). Series expansion for
/// z < a + 1, Lentz continued fraction otherwise.
double regularized_gamma_p(double a, double z);

/// CDF of the chi-squared law with `dof` degrees of freedom.
double chi2_cdf(double x, int dof);

/// Probability density of the chi-squared law.
double chi2_pdf(double x, int dof);

/// Upper-tail quantile: the x with chi2_cdf(x, dof) = 1 - alpha.
double chi2_quantile(double alpha, int dof);

}  // namespace etsddp

#endif  // ETSDDP_CHI2_HPP_
