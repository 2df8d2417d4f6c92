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

#ifndef ETSDDP_SERVER_HPP_
#define ETSDDP_SERVER_HPP_

#include "etsddp/config.hpp"

#include <filesystem>
#include <memory>
#include <string>

namespace etsddp {

struct ServerOptions {
  // Car, solver, proposal, scene, seed and synthesis minimum for every session.
  RunConfig base = parking_benchmark();
  // One dataset CSV per session is kept here.
  std::filesystem::path data_dir = "sessions";
};

/**
 * HTTP facade for the labeling workflow.
 *
 * Every endpoint takes an optional `session` query parameter (default
 * "default"). Sessions live in memory; each session's labels are appended to
 * `<data_dir>/<session>.csv` before the response is sent, and an existing
 * file is loaded when the session is first touched.
 *
 *   GET  /api/candidate   {"candidate": [px, py, theta, v]}
 *   POST /api/label       {"accepted": bool}
 *   GET  /api/dataset     dataset CSV
 *   POST /api/ellipsoid   {"alpha": x}
 *   POST /api/solve       {"initial_state": [..], "method": "ets" | "point"}
 *   GET  /api/run/<id>    run status and report
 *   GET  /api/session     counts, accepted points, ellipsoid, last run id
 *   GET  /api/scene       parking area and car footprint geometry
 *
 * Requests that break the candidate/label alternation, or that need an
 * ellipsoid or more data, get 409. Malformed bodies get 400.
 */
class LabelServer {
 public:
  explicit LabelServer(ServerOptions options);
  ~LabelServer();
  LabelServer(const LabelServer&) = delete;
  LabelServer& operator=(const LabelServer&) = delete;

  /// Binds to host:port (port 0 picks a free port). Returns the bound port,
  /// or -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called. Requires a successful bind().
  bool run();
  void stop();
  void wait_until_ready() const;

  /// Blocks until every background solve has finished.
  void join_runs();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace etsddp

#endif  // ETSDDP_SERVER_HPP_
