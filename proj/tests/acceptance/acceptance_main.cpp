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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.
//
// usage: etsddp_acceptance <etsddp-cli> <config-dir> <work-dir>

#include "etsddp/chi2.hpp"
#include "etsddp/config.hpp"
#include "etsddp/ddp.hpp"
#include "etsddp/ellipsoid.hpp"
#include "etsddp/ets.hpp"
#include "etsddp/io.hpp"
#include "etsddp/lqr.hpp"
#include "etsddp/runner.hpp"
#include "etsddp/synthesis.hpp"
#include "etsddp/vehicle.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;
using namespace etsddp;
using etsddp::testing::fd_gradient;
using etsddp::testing::fd_jacobian;
using etsddp::testing::random_spd;
using etsddp::testing::random_vector;
using etsddp::testing::rel_error;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(const std::string& name, Outcome& o) {
  std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << std::endl;
  if (!o.pass) ++failures;
}

// ---------------------------------------------------------------------------

Outcome riccati_equivalence() {
  Outcome o;
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> pick_n(1, 4), pick_l(1, 2), pick_t(1, 50);
  double worst_cost = 0.0, worst_gain = 0.0, worst_feedforward = 0.0;
  const auto start = Clock::now();
  for (int trial = 0; trial < 50; ++trial) {
    const int n = pick_n(rng), l = pick_l(rng), horizon = pick_t(rng);
    const Eigen::MatrixXd a =
        Eigen::MatrixXd::Identity(n, n) + 0.3 * random_vector(n * n, rng).reshaped(n, n);
    const Eigen::MatrixXd b = random_vector(n * l, rng).reshaped(n, l);
    const Eigen::MatrixXd q = random_spd(n, rng, 0.1), r = random_spd(l, rng, 0.5),
                          qf = random_spd(n, rng, 0.1);
    const Eigen::VectorXd x0 = random_vector(n, rng);

    // Independent Riccati recursion and closed-loop rollout.
    const auto gains = etsddp::testing::riccati_gains(a, b, q, r, qf, horizon);
    Eigen::VectorXd x = x0;
    double oracle_cost = 0.0;
    for (int t = 0; t < horizon; ++t) {
      const Eigen::VectorXd u = gains[t] * x;
      oracle_cost += x.dot(q * x) + u.dot(r * u);
      x = a * x + b * u;
    }
    oracle_cost += x.dot(qf * x);

    LinearDynamics dyn(a, b);
    QuadraticOffsetCost cost(q, r, qf);
    PointTargetObjective obj(cost, Eigen::VectorXd::Zero(n));
    SolverConfig cfg;
    cfg.horizon = horizon;
    const SolveReport rep = solve(x0, dyn, obj, cfg);
    const double cost_err = std::abs(rep.final_cost() - oracle_cost) / std::max(1.0, oracle_cost);
    worst_cost = std::max(worst_cost, cost_err);
    o.require(rep.converged, "trial " + std::to_string(trial) + " did not converge");
    o.require(cost_err < 1e-8, "trial " + std::to_string(trial) + " cost");

    const Trajectory nominal = rollout(x0, std::vector<Control>(horizon, Eigen::VectorXd::Zero(l)), dyn);
    const auto bp = backward_pass(nominal, dyn, obj, cfg, 0.0);
    o.require(bp.ok(), "trial " + std::to_string(trial) + " backward pass");
    if (!bp.ok()) continue;
    for (int t = 0; t < horizon; ++t) {
      worst_gain = std::max(worst_gain, (bp.gains.feedback[t] - gains[t]).cwiseAbs().maxCoeff());
      // About a zero-control nominal the feedforward is K_t x_t. The nominal
      // of an unstable A grows geometrically, so this extra check is relative
      // and carries the round-off of those large states.
      const Eigen::VectorXd expected = gains[t] * nominal.states[t];
      worst_feedforward = std::max(worst_feedforward, (bp.gains.feedforward[t] - expected).cwiseAbs().maxCoeff() /
                                                          std::max(1.0, expected.cwiseAbs().maxCoeff()));
    }
  }
  const double elapsed = seconds_since(start);
  o.require(worst_gain < 1e-10, "feedback gains");
  o.require(worst_feedforward < 1e-8, "feedforward gains");
  o.require(elapsed < 5.0, "runtime");
  o.detail << "50 instances, max rel cost error " << worst_cost << " (< 1e-8), max feedback gain error "
           << worst_gain << " (< 1e-10), max rel feedforward error " << worst_feedforward << " (< 1e-8), " << elapsed << " s (< 5 s)";
  return o;
}

Outcome parking_point(const fs::path& config_dir) {
  Outcome o;
  const RunConfig cfg = load_run_config(config_dir / "parking_point.json");
  const auto start = Clock::now();
  const SolveRun run = run_solve(cfg);
  const double elapsed = seconds_since(start);
  const SolveReport& r = run.report;
  const double cost = r.comparison_history.back();
  o.require(r.converged, "not converged");
  o.require(r.iterations <= 400, "iterations > 400");
  o.require(cost >= 1.4 && cost <= 2.3, "comparison cost outside [1.4, 2.3]");
  o.require(elapsed < 120.0, "runtime");
  o.detail << "converged=" << r.converged << " iterations=" << r.iterations
           << " (<= 400) comparison cost=" << cost << " (want [1.4, 2.3], reference 1.83) "
           << elapsed << " s";
  return o;
}

Outcome parking_ordering(const fs::path& config_dir) {
  Outcome o;
  const RunConfig cfg = load_run_config(config_dir / "parking_ets.json");
  const CompareRun run = run_compare(cfg);
  const ComparisonRecord& ddp = run.result.point;
  const ComparisonRecord& ets = run.result.ets;
  const double r = run.target_set.radius();
  o.require(ddp.converged && ets.converged, "a method did not converge");
  o.require(ets.iterations < ddp.iterations, "ETS-DDP not faster in iterations");
  o.require(ets.terminal_mahalanobis < r, "terminal state outside the set");
  o.require(ets.comparison_cost <= 1.35 * ddp.comparison_cost, "cost gap above 35%");
  o.detail << "r=" << r << " DDP(it=" << ddp.iterations << ", converged=" << ddp.converged
           << ", cost=" << ddp.comparison_cost << ") ETS-DDP(it=" << ets.iterations
           << ", converged=" << ets.converged << ", cost=" << ets.comparison_cost
           << ", d_M=" << ets.terminal_mahalanobis << ") cost ratio "
           << ets.comparison_cost / ddp.comparison_cost;
  return o;
}

Outcome chi_squared() {
  Outcome o;
  double worst_roundtrip = 0.0, worst_closed = 0.0;
  for (double alpha : {0.001, 0.01, 0.05, 0.1, 0.5}) {
    for (int n = 1; n <= 10; ++n) {
      const double q = chi2_quantile(alpha, n);
      worst_roundtrip = std::max(worst_roundtrip, std::abs(chi2_cdf(q, n) - (1.0 - alpha)));
    }
    worst_closed = std::max(worst_closed, std::abs(chi2_quantile(alpha, 2) + 2.0 * std::log(alpha)));
  }
  const double q4 = chi2_quantile(0.01, 4);
  const double oracle = etsddp::testing::chi2_quantile_simpson(0.01, 4);
  o.require(worst_roundtrip < 1e-8, "roundtrip");
  o.require(worst_closed < 1e-9, "n=2 closed form");
  o.require(std::abs(q4 - 13.2767) < 1e-3, "chi2_0.01(4) vs 13.2767");
  o.require(std::abs(q4 - oracle) < 1e-3, "chi2_0.01(4) vs integration oracle");
  o.detail << "roundtrip max " << worst_roundtrip << " (< 1e-8), n=2 max " << worst_closed
           << " (< 1e-9), chi2_0.01(4)=" << q4 << " oracle=" << oracle;
  return o;
}

Ellipsoid random_ellipsoid(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> radius(0.3, 3.0);
  return Ellipsoid(random_vector(n, rng), random_spd(n, rng, 0.3), radius(rng));
}

Eigen::VectorXd at_distance(const Ellipsoid& set, double scale, std::mt19937_64& rng) {
  Eigen::VectorXd dir = random_vector(set.dim(), rng);
  dir /= dir.norm();
  return set.center() + scale * set.radius() * (set.cholesky_lower() * dir);
}

Outcome projection_suite() {
  Outcome o;
  constexpr double tol = 1e-10;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> scale(0.0, 5.0), unit(0.0, 1.0);
  double idem = 0.0, excess = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Ellipsoid e = random_ellipsoid(1 + i % 4, rng);
    const Eigen::VectorXd x = at_distance(e, scale(rng), rng);
    const Eigen::VectorXd p = project(e, x);
    idem = std::max(idem, (project(e, p) - p).cwiseAbs().maxCoeff());
    excess = std::max(excess, mahalanobis(p, e) - e.radius());
  }
  o.require(idem <= tol, "idempotence");
  o.require(excess <= tol, "containment");

  const Ellipsoid ball(random_vector(4, rng), Eigen::Matrix4d::Identity(), 1.5);
  double dominance = -1e300;
  for (int i = 0; i < 10000; ++i) {
    const Eigen::VectorXd x = at_distance(ball, 1.0 + 4.0 * unit(rng), rng);
    const Eigen::VectorXd c = at_distance(ball, std::pow(unit(rng), 0.25) * 0.999999, rng);
    if (!contains(ball, c)) {
      o.require(false, "interior sample outside");
      continue;
    }
    dominance = std::max(dominance, (x - project(ball, x)).norm() - (x - c).norm());
  }
  o.require(dominance <= tol, "minimal distance");

  const vehicle::ParkingCost cost;
  double reduction = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Ellipsoid e(random_vector(4, rng), random_spd(4, rng), 0.0);
    const Eigen::VectorXd x = random_vector(4, rng, 3.0);
    const Eigen::VectorXd u = random_vector(2, rng);
    const Eigen::VectorXd off = x - e.center();
    reduction = std::max(reduction, std::abs(set_stage_value(cost, e, x, u) - cost.stage_value(off, u)));
    reduction = std::max(reduction, std::abs(set_terminal_value(cost, e, x) - cost.terminal_value(off)));
    const CostExpansion smooth = smoothed_stage_expansion(cost, e, x, u, false);
    const CostExpansion point = cost.stage_expansion(off, u);
    reduction = std::max(reduction, (smooth.grad_x - point.grad_x).cwiseAbs().maxCoeff());
    reduction = std::max(reduction, (smooth.hess_xx - point.hess_xx).cwiseAbs().maxCoeff());
  }
  o.require(reduction <= tol, "r=0 reduction");
  o.detail << "idempotence " << idem << ", containment excess " << excess
           << ", distance dominance " << dominance << " over 10000 interior points, r=0 gap "
           << reduction << " (all <= 1e-10)";
  return o;
}

Outcome derivative_fidelity() {
  Outcome o;
  constexpr double tol = 1e-4;
  constexpr int kPoints = 200;
  std::mt19937_64 rng(4242);
  const vehicle::CarParams params;
  const vehicle::ParkingCost cost(params);
  std::uniform_real_distribution<double> pos(-4, 4), th(-2 * std::numbers::pi, 2 * std::numbers::pi),
      vel(-3, 3), om(-0.5, 0.5), acc(-2, 2), zs(-3, 3), mus(0.01, 2.0), far(1.1, 5.0);
  double dyn = 0.0, huber = 0.0, costs = 0.0, smooth = 0.0, jac = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const Eigen::Vector4d x(pos(rng), pos(rng), th(rng), vel(rng));
    const Eigen::Vector2d u(om(rng), acc(rng));
    const vehicle::StepJacobians j = vehicle::step_jacobians(x, u, params);
    dyn = std::max(dyn, rel_error(j.jac_x, fd_jacobian([&](const Eigen::VectorXd& y) {
                                    return vehicle::step(y, u, params);
                                  }, x)));
    dyn = std::max(dyn, rel_error(j.jac_u, fd_jacobian([&](const Eigen::VectorXd& v) {
                                    return vehicle::step(x, v, params);
                                  }, u)));

    const double z = zs(rng), mu = mus(rng);
    const double h = 1e-5 * std::max(1.0, std::abs(z));
    const double d1 = (vehicle::huber(z + h, mu) - vehicle::huber(z - h, mu)) / (2 * h);
    const double d2 = (vehicle::huber_d1(z + h, mu) - vehicle::huber_d1(z - h, mu)) / (2 * h);
    huber = std::max(huber, std::abs(vehicle::huber_d1(z, mu) - d1) / std::max(1e-6, std::abs(d1)));
    huber = std::max(huber, std::abs(vehicle::huber_d2(z, mu) - d2) / std::max(1e-6, std::abs(d2)));

    const CostExpansion s = cost.stage_expansion(x, u);
    costs = std::max(costs, rel_error(s.grad_x, fd_gradient([&](const Eigen::VectorXd& y) {
                                        return cost.stage_value(y, u);
                                      }, x)));
    costs = std::max(costs, rel_error(s.grad_u, fd_gradient([&](const Eigen::VectorXd& v) {
                                        return cost.stage_value(x, v);
                                      }, u)));
    const CostExpansion t = cost.terminal_expansion(x);
    costs = std::max(costs, rel_error(t.grad_x, fd_gradient([&](const Eigen::VectorXd& y) {
                                        return cost.terminal_value(y);
                                      }, x)));

    for (ProjectionMode mode : {ProjectionMode::Consistent, ProjectionMode::Verbatim}) {
      const Ellipsoid e(random_vector(4, rng, 0.5), random_spd(4, rng, 0.3), 0.5 + far(rng) / 5);
      const Eigen::VectorXd p = at_distance(e, far(rng), rng);
      const Eigen::VectorXd w = random_vector(2, rng, 0.3);
      jac = std::max(jac, rel_error(offset_jacobian(e, p, mode), fd_jacobian([&](const Eigen::VectorXd& y) {
                                      return outside_offset(e, y, mode);
                                    }, p)));
      const CostExpansion se = smoothed_stage_expansion(cost, e, p, w, false, mode);
      smooth = std::max(smooth, rel_error(se.grad_x, fd_gradient([&](const Eigen::VectorXd& y) {
                                            return cost.stage_value(outside_offset(e, y, mode), w);
                                          }, p)));
      smooth = std::max(smooth, rel_error(se.grad_u, fd_gradient([&](const Eigen::VectorXd& v) {
                                            return cost.stage_value(outside_offset(e, p, mode), v);
                                          }, w)));
      const CostExpansion te = smoothed_terminal_expansion(cost, e, p, false, mode);
      smooth = std::max(smooth, rel_error(te.grad_x, fd_gradient([&](const Eigen::VectorXd& y) {
                                            return cost.terminal_value(outside_offset(e, y, mode));
                                          }, p)));
    }
  }
  o.require(dyn < tol, "vehicle Jacobians");
  o.require(huber < tol, "Huber derivatives");
  o.require(costs < tol, "cost gradients");
  o.require(smooth < tol, "smoothed cost gradients");
  o.require(jac < tol, "offset Jacobian");
  o.detail << kPoints << " points each: dynamics " << dyn << ", Huber " << huber << ", costs " << costs
           << ", smoothed " << smooth << ", offset Jacobian " << jac << " (all < 1e-4)";
  return o;
}

Outcome synthesis_coverage() {
  Outcome o;
  const ProposalSpec proposal = ProposalSpec::parking_default();
  const Dataset data = generate_dataset(proposal, 10000, 2024);
  const Ellipsoid e = synthesize_ellipsoid(data, 0.01);
  const double fraction = coverage_fraction(data, e);
  o.require(fraction >= 0.985 && fraction <= 0.995, "coverage");
  o.detail << "10000 samples, alpha=0.01, in-ellipsoid fraction " << fraction << " (want [0.985, 0.995])";
  return o;
}

int run_cli(const fs::path& cli, const std::string& args, const fs::path& log) {
  const std::string cmd = "\"" + cli.string() + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism(const fs::path& cli, const fs::path& config_dir, const fs::path& work) {
  Outcome o;
  const fs::path config = config_dir / "parking_ets.json";
  int codes[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path dir = work / ("run" + std::to_string(k));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cfg = "--config \"" + config.string() + "\" --seed 7";
    o.require(run_cli(cli, "gen-data " + cfg + " --out \"" + (dir / "data.csv").string() + "\"",
                      dir / "gen.log") == 0,
              "gen-data exit code");
    codes[k] = run_cli(cli, "solve " + cfg + " --out \"" + (dir / "solve").string() + "\"", dir / "solve.log");
    o.require(codes[k] == 0 || codes[k] == 1, "solve exit code");
  }
  o.require(codes[0] == codes[1], "exit codes differ");
  int compared = 0;
  for (const char* name : {"data.csv", "solve/trajectory.csv", "solve/cost_history.csv",
                           "solve/report.json", "solve/ellipsoid.json"}) {
    const fs::path a = work / "run0" / name, b = work / "run1" / name;
    if (!fs::exists(a) || !fs::exists(b)) {
      o.require(false, std::string(name) + " missing");
      continue;
    }
    o.require(io::read_text(a) == io::read_text(b), std::string(name) + " differs");
    ++compared;
  }
  o.detail << compared << " artifacts byte-identical across two CLI runs (timing.json excluded), solve exit "
           << codes[0];
  return o;
}

template <typename F>
void guarded(const std::string& name, F&& f) {
  try {
    Outcome o = f();
    report(name, o);
  } catch (const std::exception& e) {
    Outcome o;
    o.pass = false;
    o.detail << "exception: " << e.what();
    report(name, o);
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: " << argv[0] << " <etsddp-cli> <config-dir> <work-dir>\n";
    return 2;
  }
  const fs::path cli = argv[1], config_dir = argv[2], work = argv[3];
  fs::create_directories(work);

  guarded("riccati_equivalence", riccati_equivalence);
  guarded("parking_point_ddp", [&] { return parking_point(config_dir); });
  guarded("parking_ets_vs_ddp", [&] { return parking_ordering(config_dir); });
  guarded("chi_squared", chi_squared);
  guarded("projection_suite", projection_suite);
  guarded("derivative_fidelity", derivative_fidelity);
  guarded("synthesis_coverage", synthesis_coverage);
  guarded("determinism", [&] { return determinism(cli, config_dir, work); });

  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
