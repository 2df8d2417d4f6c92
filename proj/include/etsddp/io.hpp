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

#ifndef ETSDDP_IO_HPP_
#define ETSDDP_IO_HPP_

#include "etsddp/ellipsoid.hpp"
#include "etsddp/ets.hpp"
#include "etsddp/synthesis.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace etsddp::io {

using nlohmann::json;

/// Raised for unreadable or malformed input files. The message names the
/// file (or "<stream>") and the line when one applies.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form of a double ("%.17g" trimmed).
std::string format_double(double value);

Eigen::VectorXd vector_from_json(const json& value, const std::string& field);
Eigen::MatrixXd matrix_from_json(const json& value, const std::string& field);
json to_json(const Eigen::VectorXd& v);
json to_json(const Eigen::MatrixXd& m);

// Ellipsoid documents are {"center": [..], "sigma": [[..]], "radius": r}.
json ellipsoid_to_json(const Ellipsoid& set);
/// Validates symmetry and positive definiteness of sigma (tolerance 1e-8).
Ellipsoid ellipsoid_from_json(const json& doc);
Ellipsoid read_ellipsoid(const std::filesystem::path& path);
void write_ellipsoid(const std::filesystem::path& path, const Ellipsoid& set);

// Dataset CSV: one column per coordinate, then accepted and timestamp.
// The writer uses px,py,theta,v for four-dimensional data and x0,x1,... otherwise.
std::string dataset_header(int dimension);
std::string dataset_row(const LabeledSample& sample);
void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in, const std::string& source = "<stream>");
void write_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset(const std::filesystem::path& path);

/// t,px,py,theta,v,omega,a with an empty control on the terminal row.
void write_trajectory(std::ostream& out, const Trajectory& trajectory);

/// iter,cost,comparison_cost. comparison_cost is left empty when unknown.
void write_cost_history(std::ostream& out, const SolveReport& report);

/// method,iterations,ms_per_iter,total_s,cost
void write_comparison(std::ostream& out, const ComparisonRecord& point,
                      const ComparisonRecord& ets);

/// Deterministic solve summary: no wall-clock fields.
json report_to_json(const SolveReport& report, const std::string& method);
json timing_to_json(const SolveReport& report);

void write_text(const std::filesystem::path& path, const std::string& contents);
std::string read_text(const std::filesystem::path& path);

}  // namespace etsddp::io

#endif  // ETSDDP_IO_HPP_
