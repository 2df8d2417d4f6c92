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

#include "etsddp/server.hpp"

#include "etsddp/chi2.hpp"
#include "etsddp/io.hpp"
#include "etsddp/runner.hpp"

#include <httplib.h>

#include <fstream>
#include <map>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

namespace etsddp {

namespace {

using io::json;

constexpr const char* kJson = "application/json";

// Thrown by handlers and turned into {"error": ...} with the given status.
struct HttpError {
  int status;
  std::string message;
};

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json body;
  try {
    body = json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw HttpError{400, std::string("malformed JSON body: ") + e.what()};
  }
  if (!body.is_object()) throw HttpError{400, "request body must be a JSON object"};
  return body;
}

json trajectory_json(const Trajectory& traj) {
  json states = json::array();
  for (const auto& x : traj.states) states.push_back(io::to_json(x));
  json controls = json::array();
  for (const auto& u : traj.controls) controls.push_back(io::to_json(u));
  return json{{"states", states}, {"controls", controls}};
}

}  // namespace

struct Session {
  Session(std::string name, std::uint64_t seed, const ProposalSpec& proposal)
      : id(std::move(name)), rng(seed), sampler(proposal.mean, proposal.covariance),
        data(static_cast<int>(proposal.mean.size())) {}

  std::mutex mutex;
  std::string id;
  RandomSource rng;
  MvnSampler sampler;
  std::optional<State> pending;
  Dataset data;
  std::optional<Ellipsoid> ellipsoid;
  std::optional<int> last_run;
  std::filesystem::path csv_path;
};

struct RunState {
  int id = 0;
  std::string session;
  std::string method;
  std::string status = "running";
  std::string error;
  std::optional<SolveReport> report;
  std::optional<Ellipsoid> target_set;
};

struct LabelServer::Impl {
  explicit Impl(ServerOptions opts) : options(std::move(opts)) {
    options.base.validate();
    std::filesystem::create_directories(options.data_dir);
    routes();
  }

  ServerOptions options;
  httplib::Server http;

  std::mutex sessions_mutex;
  std::map<std::string, std::unique_ptr<Session>> sessions;

  std::mutex runs_mutex;
  std::map<int, std::shared_ptr<RunState>> runs;
  std::vector<std::thread> workers;
  int next_run = 1;

  Session& session_for(const httplib::Request& req) {
    std::string id = req.has_param("session") ? req.get_param_value("session") : "default";
    static const std::regex valid("[A-Za-z0-9_-]{1,64}");
    if (!std::regex_match(id, valid)) {
      throw HttpError{400, "session must match [A-Za-z0-9_-]{1,64}"};
    }
    std::lock_guard<std::mutex> lock(sessions_mutex);
    auto it = sessions.find(id);
    if (it != sessions.end()) return *it->second;

    auto s = std::make_unique<Session>(id, options.base.seed ^ fnv1a(id), options.base.proposal);
    s->csv_path = options.data_dir / (id + ".csv");
    std::error_code ec;
    if (std::filesystem::exists(s->csv_path, ec)) {
      try {
        s->data = io::read_dataset(s->csv_path);
      } catch (const io::FormatError& e) {
        throw HttpError{500, e.what()};
      }
      if (s->data.dimension() != static_cast<int>(options.base.proposal.mean.size())) {
        throw HttpError{500, s->csv_path.string() + ": dimension does not match the proposal"};
      }
    } else {
      io::write_text(s->csv_path, io::dataset_header(s->data.dimension()) + "\n");
    }
    return *sessions.emplace(id, std::move(s)).first->second;
  }

  static json counts(const Session& s) {
    return json{{"accepted", s.data.accepted_count()},
                {"rejected", s.data.rejected_count()},
                {"total", s.data.size()}};
  }

  json candidate(const httplib::Request& req) {
    Session& s = session_for(req);
    std::lock_guard<std::mutex> lock(s.mutex);
    if (s.pending) throw HttpError{409, "a candidate is already pending; label it first"};
    s.pending = s.sampler.sample(s.rng);
    return json{{"candidate", io::to_json(*s.pending)}};
  }

  json label(const httplib::Request& req) {
    const json body = parse_body(req);
    if (!body.contains("accepted") || !body["accepted"].is_boolean()) {
      throw HttpError{400, "body must contain a boolean 'accepted'"};
    }
    Session& s = session_for(req);
    std::lock_guard<std::mutex> lock(s.mutex);
    if (!s.pending) throw HttpError{409, "no pending candidate; request one first"};
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    LabeledSample sample{*s.pending, body["accepted"].get<bool>(),
                         std::chrono::duration<double>(now).count()};
    {
      std::ofstream out(s.csv_path, std::ios::binary | std::ios::app);
      out << io::dataset_row(sample) << '\n';
      out.flush();
      if (!out) throw HttpError{500, "failed to persist the label"};
    }
    s.data.append(std::move(sample));
    s.pending.reset();
    return counts(s);
  }

  std::string dataset(const httplib::Request& req) {
    Session& s = session_for(req);
    std::lock_guard<std::mutex> lock(s.mutex);
    std::ostringstream out;
    io::write_dataset(out, s.data);
    return out.str();
  }

  json ellipsoid(const httplib::Request& req) {
    const json body = parse_body(req);
    double alpha = 0.01;
    if (body.contains("alpha")) {
      if (!body["alpha"].is_number()) throw HttpError{400, "'alpha' must be a number"};
      alpha = body["alpha"].get<double>();
    }
    if (!(alpha > 0.0 && alpha < 1.0)) throw HttpError{400, "'alpha' must lie in (0, 1)"};
    Session& s = session_for(req);
    std::lock_guard<std::mutex> lock(s.mutex);
    SynthesisOptions synth;
    synth.min_samples = options.base.target.min_samples;
    try {
      s.ellipsoid = synthesize_ellipsoid(s.data, alpha, synth);
    } catch (const SynthesisError& e) {
      throw HttpError{409, e.what()};
    }
    io::write_ellipsoid(options.data_dir / (s.id + "_ellipsoid.json"), *s.ellipsoid);
    json doc = io::ellipsoid_to_json(*s.ellipsoid);
    doc["alpha"] = alpha;
    doc["samples"] = s.data.accepted_count();
    doc["coverage"] = coverage_fraction(s.data, *s.ellipsoid);
    return doc;
  }

  json solve(const httplib::Request& req) {
    const json body = parse_body(req);
    std::string method = "ets";
    if (body.contains("method")) {
      if (!body["method"].is_string()) throw HttpError{400, "'method' must be a string"};
      method = body["method"].get<std::string>();
    }
    if (method != "ets" && method != "point") throw HttpError{400, "'method' must be ets or point"};
    RunConfig cfg = options.base;
    if (body.contains("initial_state")) {
      try {
        cfg.initial_state = io::vector_from_json(body["initial_state"], "initial_state");
      } catch (const ConfigError& e) {
        throw HttpError{400, e.what()};
      }
      if (cfg.initial_state.size() != vehicle::kStateDim) {
        throw HttpError{400, "'initial_state' must have 4 entries"};
      }
    }
    Session& s = session_for(req);
    std::optional<Ellipsoid> set;
    {
      std::lock_guard<std::mutex> lock(s.mutex);
      if (method == "ets" && !s.ellipsoid) {
        throw HttpError{409, "synthesize an ellipsoid before an ets solve"};
      }
      set = s.ellipsoid;
    }

    auto run = std::make_shared<RunState>();
    run->session = s.id;
    run->method = method;
    run->target_set = method == "ets" ? set : std::nullopt;
    {
      std::lock_guard<std::mutex> lock(runs_mutex);
      run->id = next_run++;
      runs[run->id] = run;
      workers.emplace_back([this, run, cfg] { execute(*run, cfg); });
    }
    {
      std::lock_guard<std::mutex> lock(s.mutex);
      s.last_run = run->id;
    }
    return json{{"run_id", run->id}};
  }

  void execute(RunState& run, RunConfig cfg) {
    std::optional<SolveReport> report;
    std::string error;
    try {
      const vehicle::CarDynamics dynamics(cfg.car);
      const vehicle::ParkingCost cost(cfg.car);
      const State origin = State::Zero(vehicle::kStateDim);
      if (run.method == "ets") {
        EtsConfig ets{cfg.solver, *run.target_set, cfg.mode, cfg.evaluation_point.value_or(origin)};
        report = ets_solve(cfg.initial_state, dynamics, cost, ets);
      } else {
        report = point_solve(cfg.initial_state, dynamics, cost, cfg.target.point, cfg.solver,
                             cfg.evaluation_point);
      }
    } catch (const std::exception& e) {
      error = e.what();
    }
    std::lock_guard<std::mutex> lock(runs_mutex);
    run.report = std::move(report);
    run.error = error;
    run.status = error.empty() ? "done" : "failed";
  }

  json run_status(int id) {
    std::lock_guard<std::mutex> lock(runs_mutex);
    auto it = runs.find(id);
    if (it == runs.end()) throw HttpError{404, "unknown run id"};
    const RunState& run = *it->second;
    json doc{{"id", run.id}, {"session", run.session}, {"method", run.method},
             {"status", run.status}};
    if (!run.error.empty()) doc["error"] = run.error;
    if (run.report) {
      json report = io::report_to_json(*run.report, run.method);
      report["trajectory"] = trajectory_json(run.report->trajectory);
      report["seconds_per_iteration"] = run.report->mean_iteration_seconds();
      if (run.target_set) report["ellipsoid"] = io::ellipsoid_to_json(*run.target_set);
      doc["report"] = std::move(report);
    }
    return doc;
  }

  json session_view(const httplib::Request& req) {
    Session& s = session_for(req);
    std::lock_guard<std::mutex> lock(s.mutex);
    json doc = counts(s);
    doc["session"] = s.id;
    doc["pending"] = s.pending ? io::to_json(*s.pending) : json(nullptr);
    json points = json::array();
    for (const auto& p : s.data.accepted_points()) points.push_back(io::to_json(p));
    doc["accepted_points"] = points;
    doc["ellipsoid"] = s.ellipsoid ? io::ellipsoid_to_json(*s.ellipsoid) : json(nullptr);
    doc["last_run"] = s.last_run ? json(*s.last_run) : json(nullptr);
    doc["min_samples"] = options.base.target.min_samples.value_or(
        default_min_samples(s.data.dimension()));
    return doc;
  }

  json scene() const {
    const SceneGeometry& g = options.base.scene;
    return json{{"parking_area",
                 {{"x_min", g.area_x_min}, {"x_max", g.area_x_max},
                  {"y_min", g.area_y_min}, {"y_max", g.area_y_max}}},
                {"car",
                 {{"length", g.car_length}, {"width", g.car_width},
                  {"rear_overhang", g.rear_overhang}, {"wheelbase", options.base.car.wheelbase}}},
                {"initial_state", io::to_json(options.base.initial_state)},
                {"target_point", io::to_json(options.base.target.point)}};
  }

  template <typename Fn>
  static httplib::Server::Handler wrap(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const HttpError& e) {
        res.status = e.status;
        res.set_content(json{{"error", e.message}}.dump(), kJson);
      } catch (const std::exception& e) {
        res.status = 500;
        res.set_content(json{{"error", e.what()}}.dump(), kJson);
      }
    };
  }

  static void reply(httplib::Response& res, const json& doc, int status = 200) {
    res.status = status;
    res.set_content(doc.dump(), kJson);
  }

  void routes() {
    http.Get("/api/candidate", wrap([this](const auto& req, auto& res) { reply(res, candidate(req)); }));
    http.Post("/api/label", wrap([this](const auto& req, auto& res) { reply(res, label(req)); }));
    http.Get("/api/dataset", wrap([this](const auto& req, auto& res) {
      res.set_content(dataset(req), "text/csv");
    }));
    http.Post("/api/ellipsoid", wrap([this](const auto& req, auto& res) { reply(res, ellipsoid(req)); }));
    http.Post("/api/solve", wrap([this](const auto& req, auto& res) { reply(res, solve(req), 202); }));
    http.Get(R"(/api/run/(\d+))", wrap([this](const auto& req, auto& res) {
      int id = 0;
      try {
        id = std::stoi(req.matches[1].str());
      } catch (const std::exception&) {
        throw HttpError{404, "unknown run id"};
      }
      reply(res, run_status(id));
    }));
    http.Get("/api/session", wrap([this](const auto& req, auto& res) { reply(res, session_view(req)); }));
    http.Get("/api/scene", wrap([this](const auto&, auto& res) { reply(res, scene()); }));
  }

  void join() {
    std::vector<std::thread> pending;
    {
      std::lock_guard<std::mutex> lock(runs_mutex);
      pending.swap(workers);
    }
    for (auto& t : pending) t.join();
  }
};

LabelServer::LabelServer(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

LabelServer::~LabelServer() {
  stop();
  impl_->join();
}

int LabelServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool LabelServer::run() { return impl_->http.listen_after_bind(); }

void LabelServer::stop() { impl_->http.stop(); }

void LabelServer::wait_until_ready() const { impl_->http.wait_until_ready(); }

void LabelServer::join_runs() { impl_->join(); }

}  // namespace etsddp
