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

#ifndef ETSDDP_RUNNER_HPP_
#define ETSDDP_RUNNER_HPP_

#include "etsddp/config.hpp"
#include "etsddp/ets.hpp"
#include "etsddp/synthesis.hpp"

#include <optional>

namespace etsddp {

/// `count` accepted rows drawn from the proposal, timestamps zero.
Dataset generate_dataset(const ProposalSpec& proposal, int count, std::uint64_t seed);

/// Ellipsoid described by a set-valued target (ellipsoid, dataset or
/// synthetic). Throws ConfigError for point targets.
Ellipsoid resolve_target_set(const RunConfig& config);

struct SolveRun {
  std::string method;  // "point" or "ets"
  SolveReport report;
  std::optional<Ellipsoid> target_set;
};

/// Point DDP for point targets, ETS-DDP otherwise.
SolveRun run_solve(const RunConfig& config);

struct CompareRun {
  Ellipsoid target_set;
  ComparisonResult result;
};

/// Point DDP and ETS-DDP on the same settings. Requires a set-valued target.
CompareRun run_compare(const RunConfig& config);

// Artifact writers. Everything except timing.json is a pure function of the
// config and seed.
void write_solve_artifacts(const std::filesystem::path& dir, const SolveRun& run);
void write_compare_artifacts(const std::filesystem::path& dir, const CompareRun& run);

}  // namespace etsddp

#endif  // ETSDDP_RUNNER_HPP_
