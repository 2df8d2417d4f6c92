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

#include "etsddp/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace etsddp::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text, const std::string& where) {
  const std::string cell = trim(text);
  if (cell.empty()) throw FormatError(where + ": empty numeric field");
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || errno == ERANGE) {
    throw FormatError(where + ": cannot parse '" + cell + "' as a number");
  }
  return value;
}

std::string where(const std::string& source, int line) {
  return source + ":" + std::to_string(line);
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

Eigen::VectorXd vector_from_json(const json& value, const std::string& field) {
  if (!value.is_array()) throw ConfigError(field, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_number()) throw ConfigError(field, "expected an array of numbers");
    v[static_cast<Eigen::Index>(i)] = value[i].get<double>();
  }
  if (!v.allFinite()) throw ConfigError(field, "entries must be finite");
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& value, const std::string& field) {
  if (!value.is_array() || value.empty()) throw ConfigError(field, "expected a nonempty array of rows");
  const std::size_t rows = value.size();
  const std::size_t cols = value[0].is_array() ? value[0].size() : 0;
  if (cols == 0) throw ConfigError(field, "expected a nonempty array of rows");
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!value[i].is_array() || value[i].size() != cols) {
      throw ConfigError(field, "rows must all have the same length");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (!value[i][j].is_number()) throw ConfigError(field, "entries must be numbers");
      m(i, j) = value[i][j].get<double>();
    }
  }
  if (!m.allFinite()) throw ConfigError(field, "entries must be finite");
  return m;
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

json ellipsoid_to_json(const Ellipsoid& set) {
  return json{{"center", to_json(set.center())},
              {"sigma", to_json(set.shape())},
              {"radius", set.radius()}};
}

Ellipsoid ellipsoid_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("ellipsoid", "expected an object");
  for (const char* key : {"center", "sigma", "radius"}) {
    if (!doc.contains(key)) throw ConfigError(key, "missing");
  }
  Eigen::VectorXd center = vector_from_json(doc.at("center"), "center");
  Eigen::MatrixXd sigma = matrix_from_json(doc.at("sigma"), "sigma");
  if (!doc.at("radius").is_number()) throw ConfigError("radius", "expected a number");
  const double radius = doc.at("radius").get<double>();
  if (sigma.rows() != center.size() || sigma.cols() != center.size()) {
    throw ConfigError("sigma", "must be n x n where n is the length of center");
  }
  if (!(radius >= 0.0)) throw ConfigError("radius", "must be nonnegative");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw ConfigError("sigma", "must be symmetric");
  }
  try {
    return Ellipsoid(std::move(center), std::move(sigma), radius);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("sigma", e.what());
  }
}

Ellipsoid read_ellipsoid(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return ellipsoid_from_json(doc);
}

void write_ellipsoid(const std::filesystem::path& path, const Ellipsoid& set) {
  write_text(path, ellipsoid_to_json(set).dump(2) + "\n");
}

std::string dataset_header(int dimension) {
  std::string header;
  if (dimension == 4) {
    header = "px,py,theta,v";
  } else {
    for (int i = 0; i < dimension; ++i) header += (i ? ",x" : "x") + std::to_string(i);
  }
  return header + ",accepted,timestamp";
}

std::string dataset_row(const LabeledSample& sample) {
  std::string row;
  for (Eigen::Index i = 0; i < sample.point.size(); ++i) {
    row += format_double(sample.point[i]);
    row += ',';
  }
  row += sample.accepted ? "1," : "0,";
  row += format_double(sample.timestamp);
  return row;
}

void write_dataset(std::ostream& out, const Dataset& data) {
  out << dataset_header(data.dimension()) << '\n';
  for (const auto& s : data.samples()) out << dataset_row(s) << '\n';
}

Dataset read_dataset(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(source + ": missing header");
  const auto header = split_csv_line(trim(line));
  if (header.size() < 3 || trim(header[header.size() - 2]) != "accepted" ||
      trim(header.back()) != "timestamp") {
    throw FormatError(source + ":1: header must end with accepted,timestamp");
  }
  const int dim = static_cast<int>(header.size()) - 2;
  Dataset data(dim);
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(trim(line));
    if (static_cast<int>(cells.size()) != dim + 2) {
      throw FormatError(where(source, number) + ": expected " + std::to_string(dim + 2) +
                        " fields, found " + std::to_string(cells.size()));
    }
    LabeledSample s;
    s.point.resize(dim);
    for (int i = 0; i < dim; ++i) s.point[i] = parse_double(cells[i], where(source, number));
    const std::string flag = trim(cells[dim]);
    if (flag != "0" && flag != "1") {
      throw FormatError(where(source, number) + ": accepted must be 0 or 1");
    }
    s.accepted = flag == "1";
    s.timestamp = parse_double(cells[dim + 1], where(source, number));
    try {
      data.append(std::move(s));
    } catch (const std::invalid_argument& e) {
      throw FormatError(where(source, number) + ": " + e.what());
    }
  }
  return data;
}

void write_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ostringstream out;
  write_dataset(out, data);
  write_text(path, out.str());
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open");
  return read_dataset(in, path.string());
}

void write_trajectory(std::ostream& out, const Trajectory& trajectory) {
  out << "t,px,py,theta,v,omega,a\n";
  for (std::size_t t = 0; t < trajectory.states.size(); ++t) {
    out << t;
    const auto& x = trajectory.states[t];
    for (Eigen::Index i = 0; i < x.size(); ++i) out << ',' << format_double(x[i]);
    if (t < trajectory.controls.size()) {
      const auto& u = trajectory.controls[t];
      for (Eigen::Index i = 0; i < u.size(); ++i) out << ',' << format_double(u[i]);
    } else {
      const auto l = trajectory.controls.empty() ? 0 : trajectory.controls.front().size();
      for (Eigen::Index i = 0; i < l; ++i) out << ',';
    }
    out << '\n';
  }
}

void write_cost_history(std::ostream& out, const SolveReport& report) {
  out << "iter,cost,comparison_cost\n";
  for (std::size_t i = 0; i < report.cost_history.size(); ++i) {
    out << i << ',' << format_double(report.cost_history[i]) << ',';
    if (i < report.comparison_history.size()) out << format_double(report.comparison_history[i]);
    out << '\n';
  }
}

void write_comparison(std::ostream& out, const ComparisonRecord& point,
                      const ComparisonRecord& ets) {
  out << "method,iterations,ms_per_iter,total_s,cost\n";
  for (const ComparisonRecord* r : {&point, &ets}) {
    out << r->method << ',' << r->iterations << ',' << format_double(1e3 * r->seconds_per_iteration)
        << ',' << format_double(r->total_seconds) << ',' << format_double(r->comparison_cost)
        << '\n';
  }
}

json report_to_json(const SolveReport& report, const std::string& method) {
  json doc;
  doc["method"] = method;
  doc["converged"] = report.converged;
  doc["iterations"] = report.iterations;
  doc["message"] = report.message;
  doc["final_cost"] = report.final_cost();
  if (!report.comparison_history.empty()) {
    doc["comparison_cost"] = report.comparison_history.back();
  }
  doc["final_regularization"] = report.final_regularization;
  doc["initial_state"] = to_json(report.trajectory.states.front());
  doc["terminal_state"] = to_json(report.trajectory.terminal());
  if (report.terminal_mahalanobis) doc["terminal_mahalanobis"] = *report.terminal_mahalanobis;
  doc["cost_history"] = report.cost_history;
  doc["comparison_history"] = report.comparison_history;
  return doc;
}

json timing_to_json(const SolveReport& report) {
  return json{{"iteration_seconds", report.iteration_seconds},
              {"mean_iteration_seconds", report.mean_iteration_seconds()},
              {"total_seconds", report.total_seconds()}};
}

void write_text(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  out << contents;
  out.flush();
  if (!out) throw FormatError(path.string() + ": write failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace etsddp::io
