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

#ifndef ETSDDP_CONFIG_HPP_
#define ETSDDP_CONFIG_HPP_

#include "etsddp/ellipsoid.hpp"
#include "etsddp/io.hpp"
#include "etsddp/vehicle.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace etsddp {

enum class TargetKind { Point, Ellipsoid, Dataset, Synthetic };

std::string_view to_string(TargetKind kind);

/// Exactly one target description. `path` is used by Ellipsoid (when not
/// inline) and Dataset; `alpha` by Dataset and Synthetic.
struct TargetSpec {
  TargetKind kind = TargetKind::Point;
  State point = State::Zero(vehicle::kStateDim);
  std::optional<Ellipsoid> ellipsoid;
  std::filesystem::path path;
  double alpha = 0.01;
  int samples = 86;
  std::optional<int> min_samples;
};

/// Gaussian the candidate poses are drawn from.
struct ProposalSpec {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  static ProposalSpec parking_default();
};

/// Static geometry handed to the labeling front end.
struct SceneGeometry {
  double area_x_min = -2.5;
  double area_x_max = 2.5;
  double area_y_min = -1.5;
  double area_y_max = 1.5;
  double car_length = 4.0;
  double car_width = 1.8;
  double rear_overhang = 1.0;
};

struct RunConfig {
  vehicle::CarParams car;
  SolverConfig solver;
  TargetSpec target;
  State initial_state;
  ProjectionMode mode = ProjectionMode::Consistent;
  std::optional<State> evaluation_point;
  ProposalSpec proposal = ProposalSpec::parking_default();
  SceneGeometry scene;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

/// T = 500, x0 = (3, 3, 3 pi / 2, 0), benchmark weights and input box.
RunConfig parking_benchmark();

/// Parses a run config document. Missing fields keep the parking_benchmark()
/// values; relative file paths are resolved against `base_dir`.
RunConfig parse_run_config(const io::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace etsddp

#endif  // ETSDDP_CONFIG_HPP_
