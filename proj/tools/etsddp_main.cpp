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

// Command-line front end: solve, compare, synthesize, gen-data, serve.
//
// Exit status: 0 success (and convergence for solve/compare), 1 solver did
// not converge (artifacts are still written), 2 invalid input.

#include "etsddp/config.hpp"
#include "etsddp/io.hpp"
#include "etsddp/runner.hpp"
#include "etsddp/server.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <iostream>
#include <optional>

namespace {

using namespace etsddp;

constexpr int kOk = 0;
constexpr int kNotConverged = 1;
constexpr int kInvalid = 2;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

RunConfig load(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? parking_benchmark() : load_run_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.output_dir = *o.out;
  return cfg;
}

void print_vector(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) std::printf("%s%.6g", i ? " " : "", v[i]);
}

int cmd_solve(const Overrides& o) {
  const RunConfig cfg = load(o);
  const SolveRun run = run_solve(cfg);
  write_solve_artifacts(cfg.output_dir, run);
  const SolveReport& r = run.report;
  std::printf("method=%s converged=%d iterations=%d cost=%.10g", run.method.c_str(), r.converged,
              r.iterations, r.final_cost());
  if (!r.comparison_history.empty()) std::printf(" comparison_cost=%.10g", r.comparison_history.back());
  if (r.terminal_mahalanobis) {
    std::printf(" terminal_dM=%.6g radius=%.6g", *r.terminal_mahalanobis, run.target_set->radius());
  }
  std::printf("\nterminal_state=");
  print_vector(r.trajectory.terminal());
  std::printf("\n%s\n", r.message.c_str());
  return r.converged ? kOk : kNotConverged;
}

int cmd_compare(const Overrides& o) {
  const RunConfig cfg = load(o);
  const CompareRun run = run_compare(cfg);
  write_compare_artifacts(cfg.output_dir, run);
  std::printf("radius=%.6g\n", run.target_set.radius());
  std::printf("%-8s %10s %12s %10s %12s %10s\n", "method", "iterations", "ms_per_iter", "total_s",
              "cost", "dM");
  for (const ComparisonRecord* r : {&run.result.point, &run.result.ets}) {
    std::printf("%-8s %10d %12.4f %10.4f %12.6f %10.4f%s\n", r->method.c_str(), r->iterations,
                1e3 * r->seconds_per_iteration, r->total_seconds, r->comparison_cost,
                r->terminal_mahalanobis, r->converged ? "" : "  (not converged)");
  }
  return run.result.point.converged && run.result.ets.converged ? kOk : kNotConverged;
}

int cmd_synthesize(const std::string& dataset_path, double alpha, std::optional<int> min_samples,
                   const std::optional<std::string>& out) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha", "must lie in (0, 1)");
  const Dataset data = io::read_dataset(dataset_path);
  SynthesisOptions options;
  options.min_samples = min_samples;
  const Ellipsoid set = synthesize_ellipsoid(data, alpha, options);
  const std::string doc = io::ellipsoid_to_json(set).dump(2) + "\n";
  if (out) {
    io::write_text(*out, doc);
  } else {
    std::cout << doc;
  }
  std::fprintf(stderr, "n=%d N=%d alpha=%g r=%.9g coverage=%.6f\n", set.dim(),
               data.accepted_count(), alpha, set.radius(), coverage_fraction(data, set));
  return kOk;
}

int cmd_gen_data(const Overrides& o, int samples) {
  if (samples < 0) throw ConfigError("samples", "must be nonnegative");
  const RunConfig cfg = load(o);
  const Dataset data = generate_dataset(cfg.proposal, samples, cfg.seed);
  if (!o.out) throw ConfigError("out", "an output file is required");
  io::write_dataset(std::filesystem::path(*o.out), data);
  std::fprintf(stderr, "wrote %d samples to %s\n", data.size(), o.out->c_str());
  return kOk;
}

LabelServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const Overrides& o, const std::string& host, int port, const std::string& data_dir) {
  ServerOptions options;
  options.base = load(o);
  options.data_dir = data_dir;
  LabelServer server(options);
  const int bound = server.bind(host, port);
  if (bound < 0) {
    std::fprintf(stderr, "error: cannot bind %s:%d\n", host.c_str(), port);
    return kInvalid;
  }
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::printf("listening on http://%s:%d\n", host.c_str(), bound);
  std::fflush(stdout);
  server.run();
  g_server = nullptr;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Set-target trajectory optimization for the car parking benchmark"};
  app.require_subcommand(1);

  Overrides solve_o, compare_o, gen_o, serve_o;
  auto add_common = [](CLI::App* sub, Overrides& o, bool need_config) {
    auto* opt = sub->add_option("--config", o.config, "Run config JSON");
    if (need_config) opt->required();
    sub->add_option("--seed", o.seed, "Random seed (overrides the config)");
    sub->add_option("--out", o.out, "Output directory (overrides the config)");
  };

  auto* solve = app.add_subcommand("solve", "Run point DDP or ETS-DDP as configured");
  add_common(solve, solve_o, true);

  auto* cmp = app.add_subcommand("compare", "Run point DDP and ETS-DDP and tabulate both");
  add_common(cmp, compare_o, true);

  auto* synth = app.add_subcommand("synthesize", "Fit the target ellipsoid to a dataset CSV");
  std::string dataset_path;
  double alpha = 0.01;
  std::optional<int> min_samples;
  std::optional<std::string> synth_out;
  synth->add_option("dataset", dataset_path, "Dataset CSV")->required();
  synth->add_option("--alpha", alpha, "Significance level in (0, 1)");
  synth->add_option("--min-samples", min_samples, "Minimum accepted samples");
  synth->add_option("--out", synth_out, "Ellipsoid JSON output file (default: stdout)");

  auto* gen = app.add_subcommand("gen-data", "Sample accepted rows from the proposal Gaussian");
  int samples = 86;
  gen->add_option("--config", gen_o.config, "Run config JSON providing the proposal");
  gen->add_option("--seed", gen_o.seed, "Random seed");
  gen->add_option("--out", gen_o.out, "Dataset CSV output file")->required();
  gen->add_option("--samples", samples, "Number of samples");

  auto* serve = app.add_subcommand("serve", "Serve the labeling HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir = "sessions";
  serve->add_option("--config", serve_o.config, "Run config JSON");
  serve->add_option("--seed", serve_o.seed, "Random seed");
  serve->add_option("--port", port, "TCP port (0 picks a free one)");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--data-dir", data_dir, "Directory for session CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*solve) return cmd_solve(solve_o);
    if (*cmp) return cmd_compare(compare_o);
    if (*synth) return cmd_synthesize(dataset_path, alpha, min_samples, synth_out);
    if (*gen) return cmd_gen_data(gen_o, samples);
    if (*serve) return cmd_serve(serve_o, host, port, data_dir);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: invalid config: %s\n", e.what());
    return kInvalid;
  } catch (const io::FormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  } catch (const SynthesisError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNotConverged;
  }
  return kInvalid;
}
