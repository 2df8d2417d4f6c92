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

#include "etsddp/runner.hpp"

#include <sstream>

namespace etsddp {

namespace {

std::string csv(const auto& writer) {
  std::ostringstream out;
  writer(out);
  return out.str();
}

void write_report_files(const std::filesystem::path& dir, const SolveReport& report,
                        const std::string& method) {
  io::write_text(dir / "trajectory.csv",
                 csv([&](std::ostream& o) { io::write_trajectory(o, report.trajectory); }));
  io::write_text(dir / "cost_history.csv",
                 csv([&](std::ostream& o) { io::write_cost_history(o, report); }));
  io::write_text(dir / "report.json", io::report_to_json(report, method).dump(2) + "\n");
}

State evaluation_point(const RunConfig& config) {
  if (config.evaluation_point) return *config.evaluation_point;
  if (config.target.kind == TargetKind::Point) return config.target.point;
  return State::Zero(vehicle::kStateDim);
}

}  // namespace

Dataset generate_dataset(const ProposalSpec& proposal, int count, std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("generate_dataset: negative sample count");
  MvnSampler sampler(proposal.mean, proposal.covariance);
  RandomSource rng(seed);
  Dataset data(static_cast<int>(proposal.mean.size()));
  for (int i = 0; i < count; ++i) data.append({sampler.sample(rng), true, 0.0});
  return data;
}

Ellipsoid resolve_target_set(const RunConfig& config) {
  const TargetSpec& t = config.target;
  SynthesisOptions options;
  options.min_samples = t.min_samples;
  switch (t.kind) {
    case TargetKind::Point:
      throw ConfigError("target.kind", "a set-valued target (ellipsoid, dataset, synthetic) is required");
    case TargetKind::Ellipsoid:
      if (t.ellipsoid) return *t.ellipsoid;
      try {
        return io::read_ellipsoid(t.path);
      } catch (const io::FormatError& e) {
        throw ConfigError("target.file", e.what());
      }
    case TargetKind::Dataset: {
      Dataset data(vehicle::kStateDim);
      try {
        data = io::read_dataset(t.path);
      } catch (const io::FormatError& e) {
        throw ConfigError("target.file", e.what());
      }
      return synthesize_ellipsoid(data, t.alpha, options);
    }
    case TargetKind::Synthetic:
      return synthesize_ellipsoid(generate_dataset(config.proposal, t.samples, config.seed),
                                  t.alpha, options);
  }
  throw ConfigError("target.kind", "unsupported");
}

SolveRun run_solve(const RunConfig& config) {
  config.validate();
  const vehicle::CarDynamics dynamics(config.car);
  const vehicle::ParkingCost cost(config.car);
  SolveRun run;
  if (config.target.kind == TargetKind::Point) {
    run.method = "point";
    run.report = point_solve(config.initial_state, dynamics, cost, config.target.point,
                             config.solver, evaluation_point(config));
    return run;
  }
  run.method = "ets";
  run.target_set = resolve_target_set(config);
  EtsConfig ets{config.solver, *run.target_set, config.mode, evaluation_point(config)};
  run.report = ets_solve(config.initial_state, dynamics, cost, ets);
  return run;
}

CompareRun run_compare(const RunConfig& config) {
  config.validate();
  const vehicle::CarDynamics dynamics(config.car);
  const vehicle::ParkingCost cost(config.car);
  Ellipsoid set = resolve_target_set(config);
  EtsConfig ets{config.solver, set, config.mode, evaluation_point(config)};
  return {set, compare(config.initial_state, dynamics, cost, ets)};
}

void write_solve_artifacts(const std::filesystem::path& dir, const SolveRun& run) {
  write_report_files(dir, run.report, run.method);
  if (run.target_set) io::write_ellipsoid(dir / "ellipsoid.json", *run.target_set);
  io::write_text(dir / "timing.json", io::timing_to_json(run.report).dump(2) + "\n");
}

void write_compare_artifacts(const std::filesystem::path& dir, const CompareRun& run) {
  const ComparisonResult& result = run.result;
  write_report_files(dir / "ddp", result.point_report, "point");
  write_report_files(dir / "ets", result.ets_report, "ets");
  io::write_ellipsoid(dir / "ellipsoid.json", run.target_set);
  io::write_text(dir / "comparison.csv", csv([&](std::ostream& o) {
                   io::write_comparison(o, result.point, result.ets);
                 }));
  io::json timing{{"ddp", io::timing_to_json(result.point_report)},
                  {"ets", io::timing_to_json(result.ets_report)}};
  io::write_text(dir / "timing.json", timing.dump(2) + "\n");
}

}  // namespace etsddp
