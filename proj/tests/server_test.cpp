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
#include "etsddp/io.hpp"
#include "etsddp/server.hpp"
#include "oracles.hpp"

#include <httplib.h>
#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <thread>

namespace etsddp {
namespace {

namespace fs = std::filesystem;
using io::json;

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("etsddp_server_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    start();
  }

  void TearDown() override {
    stop();
    fs::remove_all(dir_);
  }

  void start() {
    ServerOptions options;
    options.base.solver.horizon = 60;
    options.base.solver.max_iterations = 15;
    options.base.initial_state = Eigen::Vector4d(0.5, 0.4, 0.1, 0.0);
    options.data_dir = dir_;
    server_ = std::make_unique<LabelServer>(options);
    port_ = server_->bind("127.0.0.1", 0);
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_->run(); });
    server_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }

  void stop() {
    if (!server_) return;
    server_->stop();
    if (thread_.joinable()) thread_.join();
    server_->join_runs();
    server_.reset();
  }

  httplib::Result get(const std::string& path) { return client_->Get(path); }
  httplib::Result post(const std::string& path, const std::string& body) {
    return client_->Post(path, body, "application/json");
  }

  json label_one(bool accepted, const std::string& session = "default") {
    auto c = get("/api/candidate?session=" + session);
    EXPECT_EQ(c->status, 200);
    auto r = post("/api/label?session=" + session, json{{"accepted", accepted}}.dump());
    EXPECT_EQ(r->status, 200) << r->body;
    return json::parse(r->body);
  }

  json wait_for_run(int id) {
    for (int i = 0; i < 600; ++i) {
      auto r = get("/api/run/" + std::to_string(id));
      const json doc = json::parse(r->body);
      if (doc["status"] != "running") return doc;
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    ADD_FAILURE() << "run " << id << " did not finish";
    return json();
  }

  fs::path dir_;
  std::unique_ptr<LabelServer> server_;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
  int port_ = -1;
};

TEST_F(ServerTest, CandidateHasFourEntries) {
  auto r = get("/api/candidate");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(json::parse(r->body)["candidate"].size(), 4u);
}

TEST_F(ServerTest, AlternationIsEnforced) {
  auto orphan = post("/api/label", R"({"accepted": true})");
  EXPECT_EQ(orphan->status, 409);
  EXPECT_TRUE(json::parse(orphan->body).contains("error"));
  EXPECT_EQ(get("/api/candidate")->status, 200);
  EXPECT_EQ(get("/api/candidate")->status, 409);
}

TEST_F(ServerTest, MalformedBodiesAreRejected) {
  get("/api/candidate");
  EXPECT_EQ(post("/api/label", "{not json")->status, 400);
  EXPECT_EQ(post("/api/label", R"({"accepted": "yes"})")->status, 400);
  EXPECT_EQ(post("/api/label", R"([true])")->status, 400);
  EXPECT_EQ(post("/api/ellipsoid", R"({"alpha": 2})")->status, 400);
  EXPECT_EQ(post("/api/solve", R"({"method": "magic"})")->status, 400);
  EXPECT_EQ(post("/api/solve", R"({"method": "point", "initial_state": [1, 2]})")->status, 400);
  EXPECT_EQ(get("/api/candidate?session=bad%20id")->status, 400);
}

TEST_F(ServerTest, LabelsAreCountedAndPersisted) {
  json counts;
  for (int i = 0; i < 5; ++i) counts = label_one(i % 2 == 0);
  EXPECT_EQ(counts["total"], 5);
  EXPECT_EQ(counts["accepted"], 3);
  EXPECT_EQ(counts["rejected"], 2);

  auto csv = get("/api/dataset");
  EXPECT_EQ(csv->status, 200);
  std::istringstream in(csv->body);
  const Dataset served = io::read_dataset(in);
  EXPECT_EQ(served.size(), 5);

  // The file on disk already holds every label without a shutdown.
  const Dataset on_disk = io::read_dataset(dir_ / "default.csv");
  EXPECT_EQ(on_disk.size(), 5);
  EXPECT_EQ(on_disk.accepted_count(), 3);
  EXPECT_EQ(on_disk.samples()[4].point, served.samples()[4].point);
}

TEST_F(ServerTest, RestartReloadsTheSession) {
  for (int i = 0; i < 3; ++i) label_one(true);
  stop();
  start();
  const json view = json::parse(get("/api/session")->body);
  EXPECT_EQ(view["total"], 3);
  EXPECT_EQ(view["accepted_points"].size(), 3u);
}

TEST_F(ServerTest, EllipsoidRadiusMatchesTheQuantile) {
  EXPECT_EQ(post("/api/ellipsoid", "{}")->status, 409);
  for (int i = 0; i < 10; ++i) label_one(true);
  auto r = post("/api/ellipsoid", R"({"alpha": 0.01})");
  ASSERT_EQ(r->status, 200) << r->body;
  const json doc = json::parse(r->body);
  const double radius = doc["radius"].get<double>();
  EXPECT_NEAR(radius, std::sqrt(chi2_quantile(0.01, 4)), 1e-12);
  EXPECT_NEAR(radius * radius, testing::chi2_quantile_simpson(0.01, 4), 1e-6);
  EXPECT_EQ(doc["samples"], 10);
  EXPECT_EQ(doc["center"].size(), 4u);
  EXPECT_TRUE(fs::exists(dir_ / "default_ellipsoid.json"));
  const Ellipsoid saved = io::read_ellipsoid(dir_ / "default_ellipsoid.json");
  EXPECT_EQ(saved.radius(), radius);
}

TEST_F(ServerTest, SolvesRunInTheBackground) {
  EXPECT_EQ(post("/api/solve", R"({"method": "ets"})")->status, 409);

  auto point = post("/api/solve", R"({"method": "point"})");
  ASSERT_EQ(point->status, 202) << point->body;
  const json done = wait_for_run(json::parse(point->body)["run_id"].get<int>());
  EXPECT_EQ(done["status"], "done");
  EXPECT_EQ(done["method"], "point");
  EXPECT_EQ(done["report"]["trajectory"]["states"].size(), 61u);
  EXPECT_EQ(done["report"]["trajectory"]["controls"].size(), 60u);

  for (int i = 0; i < 10; ++i) label_one(true);
  ASSERT_EQ(post("/api/ellipsoid", "{}")->status, 200);
  auto ets = post("/api/solve", R"({"method": "ets", "initial_state": [1.0, 0.5, 0.0, 0.0]})");
  ASSERT_EQ(ets->status, 202);
  const int id = json::parse(ets->body)["run_id"].get<int>();
  const json ets_done = wait_for_run(id);
  EXPECT_EQ(ets_done["status"], "done");
  EXPECT_TRUE(ets_done["report"].contains("ellipsoid"));
  EXPECT_TRUE(ets_done["report"].contains("terminal_mahalanobis"));
  EXPECT_EQ(ets_done["report"]["initial_state"][0], 1.0);
  EXPECT_EQ(json::parse(get("/api/session")->body)["last_run"], id);

  EXPECT_EQ(get("/api/run/9999")->status, 404);
}

TEST_F(ServerTest, SessionsAreIsolated) {
  label_one(true, "alice");
  label_one(false, "alice");
  label_one(true, "bob");
  EXPECT_EQ(json::parse(get("/api/session?session=alice")->body)["total"], 2);
  EXPECT_EQ(json::parse(get("/api/session?session=bob")->body)["total"], 1);
  EXPECT_EQ(json::parse(get("/api/session")->body)["total"], 0);
  EXPECT_TRUE(fs::exists(dir_ / "alice.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "bob.csv"));
}

TEST_F(ServerTest, SceneDescribesTheParkingArea) {
  auto r = get("/api/scene");
  ASSERT_EQ(r->status, 200);
  const json doc = json::parse(r->body);
  EXPECT_EQ(doc["parking_area"]["x_min"], -2.5);
  EXPECT_EQ(doc["car"]["length"], 4.0);
  EXPECT_EQ(doc["car"]["wheelbase"], 2.0);
}

}  // namespace
}  // namespace etsddp
