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

#include "etsddp/config.hpp"

#include <cmath>
#include <initializer_list>
#include <numbers>

namespace etsddp {

namespace {

using io::json;

// Field access for one JSON object. Every key read is remembered so that
// leftovers can be reported as unknown fields.
class Section {
 public:
  Section(const json& doc, std::string prefix) : doc_(doc), prefix_(std::move(prefix)) {
    if (!doc_.is_object()) throw ConfigError(name(""), "expected an object");
  }

  std::string name(const std::string& key) const {
    if (prefix_.empty()) return key.empty() ? "config" : key;
    return key.empty() ? prefix_ : prefix_ + "." + key;
  }

  const json* find(const std::string& key) {
    seen_.push_back(key);
    auto it = doc_.find(key);
    return it == doc_.end() || it->is_null() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(name(key), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(name(key), "must be finite");
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(name(key), "expected an integer");
      const auto value = v->get<long long>();
      if (value < -1000000000LL || value > 1000000000LL) {
        throw ConfigError(name(key), "out of range");
      }
      out = static_cast<int>(value);
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(name(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(name(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void vector(const std::string& key, Eigen::VectorXd& out, Eigen::Index size = -1) {
    if (const json* v = find(key)) {
      out = io::vector_from_json(*v, name(key));
      if (size >= 0 && out.size() != size) {
        throw ConfigError(name(key), "expected " + std::to_string(size) + " entries");
      }
    }
  }

  void finish() const {
    for (const auto& item : doc_.items()) {
      bool known = false;
      for (const auto& k : seen_) known = known || k == item.key();
      if (!known) throw ConfigError(name(item.key()), "unknown field");
    }
  }

 private:
  const json& doc_;
  std::string prefix_;
  std::vector<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
  std::filesystem::path p(file);
  return p.is_relative() && !base.empty() ? base / p : p;
}

void parse_car(const json& doc, vehicle::CarParams& car) {
  Section s(doc, "car");
  s.number("wheelbase", car.wheelbase);
  s.number("time_step", car.time_step);
  s.number("q1", car.q1);
  s.number("q2", car.q2);
  s.number("r1", car.r1);
  s.number("r2", car.r2);
  Eigen::VectorXd mu;
  s.vector("mu", mu, 4);
  for (Eigen::Index i = 0; i < mu.size(); ++i) car.mu[i] = mu[i];
  s.finish();
}

void parse_solver(const json& doc, SolverConfig& solver) {
  Section s(doc, "solver");
  s.integer("horizon", solver.horizon);
  s.integer("max_iterations", solver.max_iterations);
  s.number("cost_tolerance", solver.cost_tolerance);
  s.boolean("use_second_order", solver.use_second_order);
  if (const json* steps = s.find("line_search")) {
    const Eigen::VectorXd v = io::vector_from_json(*steps, "solver.line_search");
    solver.line_search.assign(v.data(), v.data() + v.size());
  }
  if (const json* reg = s.find("regularization")) {
    Section r(*reg, "solver.regularization");
    r.number("initial", solver.regularization.initial);
    r.number("min", solver.regularization.min);
    r.number("max", solver.regularization.max);
    r.number("decrease", solver.regularization.decrease);
    r.number("increase", solver.regularization.increase);
    r.finish();
  }
  bool box = solver.has_box();
  s.boolean("box", box);
  Eigen::VectorXd lower = solver.control_lower.value_or(vehicle::default_control_lower());
  Eigen::VectorXd upper = solver.control_upper.value_or(vehicle::default_control_upper());
  s.vector("control_lower", lower);
  s.vector("control_upper", upper);
  if (box) {
    solver.control_lower = lower;
    solver.control_upper = upper;
  } else {
    solver.control_lower.reset();
    solver.control_upper.reset();
  }
  s.finish();
}

void parse_target(const json& doc, TargetSpec& target, const std::filesystem::path& base) {
  Section s(doc, "target");
  std::string kind;
  s.string("kind", kind);
  if (kind == "point") {
    target.kind = TargetKind::Point;
    s.vector("point", target.point, vehicle::kStateDim);
  } else if (kind == "ellipsoid") {
    target.kind = TargetKind::Ellipsoid;
    std::string file;
    s.string("file", file);
    const bool inline_set = doc.contains("center") || doc.contains("sigma") || doc.contains("radius");
    if (file.empty() == !inline_set) {
      throw ConfigError("target.file", "give either a file or an inline center/sigma/radius");
    }
    if (inline_set) {
      json set = json::object();
      for (const char* key : {"center", "sigma", "radius"}) {
        if (const json* v = s.find(key)) set[key] = *v;
      }
      try {
        target.ellipsoid = io::ellipsoid_from_json(set);
      } catch (const ConfigError& e) {
        throw ConfigError("target." + e.field(), e.detail());
      }
    } else {
      target.path = resolve(base, file);
    }
  } else if (kind == "dataset" || kind == "synthetic") {
    target.kind = kind == "dataset" ? TargetKind::Dataset : TargetKind::Synthetic;
    s.number("alpha", target.alpha);
    int min_samples = 0;
    s.integer("min_samples", min_samples);
    if (doc.contains("min_samples")) target.min_samples = min_samples;
    if (target.kind == TargetKind::Dataset) {
      std::string file;
      s.string("file", file);
      if (file.empty()) throw ConfigError("target.file", "required for a dataset target");
      target.path = resolve(base, file);
    } else {
      s.integer("samples", target.samples);
    }
  } else {
    throw ConfigError("target.kind", "must be one of point, ellipsoid, dataset, synthetic");
  }
  s.finish();
}

void parse_proposal(const json& doc, ProposalSpec& proposal) {
  Section s(doc, "proposal");
  s.vector("mean", proposal.mean);
  if (const json* cov = s.find("covariance")) {
    proposal.covariance = io::matrix_from_json(*cov, "proposal.covariance");
  }
  s.finish();
}

void parse_scene(const json& doc, SceneGeometry& scene) {
  Section s(doc, "scene");
  s.number("area_x_min", scene.area_x_min);
  s.number("area_x_max", scene.area_x_max);
  s.number("area_y_min", scene.area_y_min);
  s.number("area_y_max", scene.area_y_max);
  s.number("car_length", scene.car_length);
  s.number("car_width", scene.car_width);
  s.number("rear_overhang", scene.rear_overhang);
  s.finish();
}

}  // namespace

std::string_view to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::Point: return "point";
    case TargetKind::Ellipsoid: return "ellipsoid";
    case TargetKind::Dataset: return "dataset";
    case TargetKind::Synthetic: return "synthetic";
  }
  return "unknown";
}

ProposalSpec ProposalSpec::parking_default() {
  ProposalSpec p;
  p.mean = Eigen::VectorXd::Zero(vehicle::kStateDim);
  const double heading = 15.0 * std::numbers::pi / 180.0;
  p.covariance = Eigen::Vector4d(0.1, 0.1, heading * heading, 1e-5).asDiagonal();
  return p;
}

void RunConfig::validate() const {
  car.validate();
  try {
    solver.validate(vehicle::kControlDim);
  } catch (const ConfigError& e) {
    throw ConfigError("solver." + e.field(), e.detail());
  }
  if (initial_state.size() != vehicle::kStateDim) {
    throw ConfigError("initial_state", "expected 4 entries");
  }
  if (evaluation_point && evaluation_point->size() != vehicle::kStateDim) {
    throw ConfigError("evaluation_point", "expected 4 entries");
  }
  switch (target.kind) {
    case TargetKind::Point:
      if (target.point.size() != vehicle::kStateDim) throw ConfigError("target.point", "expected 4 entries");
      break;
    case TargetKind::Ellipsoid:
      if (target.ellipsoid && target.ellipsoid->dim() != vehicle::kStateDim) {
        throw ConfigError("target.center", "expected 4 entries");
      }
      break;
    case TargetKind::Dataset:
    case TargetKind::Synthetic:
      if (!(target.alpha > 0.0 && target.alpha < 1.0)) {
        throw ConfigError("target.alpha", "must lie in (0, 1)");
      }
      if (target.min_samples && *target.min_samples < 2) {
        throw ConfigError("target.min_samples", "must be at least 2");
      }
      if (target.kind == TargetKind::Synthetic && target.samples < 0) {
        throw ConfigError("target.samples", "must be nonnegative");
      }
      break;
  }
  if (proposal.mean.size() != vehicle::kStateDim) throw ConfigError("proposal.mean", "expected 4 entries");
  if (proposal.covariance.rows() != vehicle::kStateDim ||
      proposal.covariance.cols() != vehicle::kStateDim) {
    throw ConfigError("proposal.covariance", "expected a 4 x 4 matrix");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(proposal.covariance);
  if (llt.info() != Eigen::Success ||
      (proposal.covariance - proposal.covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ConfigError("proposal.covariance", "must be symmetric positive definite");
  }
  if (!(scene.area_x_min < scene.area_x_max) || !(scene.area_y_min < scene.area_y_max)) {
    throw ConfigError("scene", "area bounds must satisfy min < max");
  }
  if (!(scene.car_length > 0) || !(scene.car_width > 0)) {
    throw ConfigError("scene", "car dimensions must be positive");
  }
}

RunConfig parking_benchmark() {
  RunConfig cfg;
  cfg.solver.horizon = 500;
  cfg.solver.max_iterations = 500;
  cfg.solver.use_second_order = true;
  cfg.solver.control_lower = vehicle::default_control_lower();
  cfg.solver.control_upper = vehicle::default_control_upper();
  cfg.initial_state = Eigen::Vector4d(3.0, 3.0, 1.5 * std::numbers::pi, 0.0);
  return cfg;
}

RunConfig parse_run_config(const io::json& doc, const std::filesystem::path& base_dir) {
  RunConfig cfg = parking_benchmark();
  Section s(doc, "");
  if (const json* v = s.find("seed")) {
    if (!v->is_number_integer() || (!v->is_number_unsigned() && v->get<std::int64_t>() < 0)) {
      throw ConfigError("seed", "expected a nonnegative integer");
    }
    cfg.seed = v->get<std::uint64_t>();
  }
  std::string out = cfg.output_dir.string();
  s.string("output_dir", out);
  cfg.output_dir = out;
  s.vector("initial_state", cfg.initial_state, vehicle::kStateDim);
  std::string mode(to_string(cfg.mode));
  s.string("mode", mode);
  try {
    cfg.mode = projection_mode_from_string(mode);
  } catch (const std::invalid_argument&) {
    throw ConfigError("mode", "must be consistent or verbatim");
  }
  if (doc.contains("evaluation_point")) {
    Eigen::VectorXd p;
    s.vector("evaluation_point", p, vehicle::kStateDim);
    cfg.evaluation_point = p;
  }
  if (const json* v = s.find("car")) parse_car(*v, cfg.car);
  if (const json* v = s.find("solver")) parse_solver(*v, cfg.solver);
  if (const json* v = s.find("target")) parse_target(*v, cfg.target, base_dir);
  if (const json* v = s.find("proposal")) parse_proposal(*v, cfg.proposal);
  if (const json* v = s.find("scene")) parse_scene(*v, cfg.scene);
  s.finish();
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(io::read_text(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config", path.string() + ": " + e.what());
  } catch (const io::FormatError& e) {
    throw ConfigError("config", e.what());
  }
  return parse_run_config(doc, path.parent_path());
}

}  // namespace etsddp
