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

#include "etsddp/chi2.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace etsddp {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxTerms = 10000;

double log_prefactor(double a, double z) { return -z + a * std::log(z) - std::lgamma(a); }

double gamma_p_series(double a, double z) {
  double term = 1.0 / a;
  double sum = term;
  for (int k = 1; k < kMaxTerms; ++k) {
    term *= z / (a + k);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(log_prefactor(a, z));
}

// Upper tail Q(a, z) by the modified Lentz method.
double gamma_q_fraction(double a, double z) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = z + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_prefactor(a, z)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double z) {
  if (!(a > 0)) throw std::invalid_argument("regularized_gamma_p: a must be positive");
  if (!(z >= 0)) throw std::invalid_argument("regularized_gamma_p: z must be nonnegative");
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return 1.0;
  if (z < a + 1.0) return gamma_p_series(a, z);
  return 1.0 - gamma_q_fraction(a, z);
}

double chi2_cdf(double x, int dof) {
  if (dof < 1) throw std::invalid_argument("chi2_cdf: degrees of freedom must be positive");
  if (!(x >= 0)) throw std::invalid_argument("chi2_cdf: x must be nonnegative");
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_pdf(double x, int dof) {
  if (dof < 1) throw std::invalid_argument("chi2_pdf: degrees of freedom must be positive");
  if (x < 0) return 0.0;
  const double a = 0.5 * dof;
  if (x == 0.0) {
    if (dof == 1) return std::numeric_limits<double>::infinity();
    return dof == 2 ? 0.5 : 0.0;
  }
  return std::exp((a - 1.0) * std::log(x) - 0.5 * x - a * std::log(2.0) - std::lgamma(a));
}

double chi2_quantile(double alpha, int dof) {
  if (!(alpha > 0 && alpha < 1)) {
    throw std::invalid_argument("chi2_quantile: alpha must lie in (0, 1)");
  }
  if (dof < 1) throw std::invalid_argument("chi2_quantile: degrees of freedom must be positive");
  const double target = 1.0 - alpha;

  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(dof));
  while (chi2_cdf(hi, dof) < target) {
    lo = hi;
    hi *= 2.0;
  }

  // Safeguarded Newton: fall back to bisection whenever the Newton iterate
  // leaves the bracket.
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 500; ++iter) {
    const double residual = chi2_cdf(x, dof) - target;
    if (std::abs(residual) < 1e-13) return x;
    if (residual < 0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) return 0.5 * (lo + hi);
    const double density = chi2_pdf(x, dof);
    double next = density > 0 ? x - residual / density : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

}  // namespace etsddp
