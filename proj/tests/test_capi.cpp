// Copyright 2026 The dsweep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exercises the shared library through its C header only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dsweep/dsweep.h"
#include "fixtures.hpp"

namespace {

std::filesystem::path write_file(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "dsweep_capi_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(dsw_version()) > 0);
  CHECK(std::string(dsw_status_name(DSW_OK)) == "ok");
  CHECK(std::string(dsw_status_name(DSW_ERR_CERTIFICATION)) == "certification failure");
}

TEST_CASE("model construction and info") {
  dsw_model* bvn = nullptr;
  REQUIRE(dsw_model_bvn(0.5, "x2", &bvn) == DSW_OK);
  int K = 0, flags = 0;
  size_t sd = 0, gd = 0, fd = 0;
  REQUIRE(dsw_model_info(bvn, &K, &sd, &gd, &fd, &flags) == DSW_OK);
  CHECK(K == 2);
  CHECK(sd == 2);
  CHECK(gd == 1);
  CHECK(fd == 1);
  CHECK(flags == (DSW_FLAG_GIBBS | DSW_FLAG_DATA_AUGMENTATION));
  dsw_model_destroy(bvn);

  dsw_model* ising = nullptr;
  REQUIRE(dsw_model_ising(3, 0.3, "metropolis", "raster", &ising) == DSW_OK);
  REQUIRE(dsw_model_info(ising, &K, nullptr, nullptr, nullptr, &flags) == DSW_OK);
  CHECK(K == 9);
  CHECK(flags == 0);
  dsw_model_destroy(ising);

  dsw_model* bad = nullptr;
  CHECK(dsw_model_bvn(1.5, "x2", &bad) == DSW_ERR_CONFIG);
  CHECK(bad == nullptr);
  CHECK(std::strlen(dsw_last_error()) > 0);
  CHECK(dsw_model_bvn(0.5, "cubic", &bad) == DSW_ERR_CONFIG);
  CHECK(dsw_model_ising(3, 0.3, "gibbs", "spiral", &bad) == DSW_ERR_CONFIG);
  CHECK(dsw_model_bvn(0.5, "x2", nullptr) == DSW_ERR_INVALID_ARGUMENT);
  CHECK(dsw_model_finite_json(dsweep::fixtures::kBrokenModel, &bad) == DSW_ERR_CERTIFICATION);
  CHECK(dsw_model_finite_json("{", &bad) == DSW_ERR_CONFIG);
  CHECK(dsw_model_finite_file("/nonexistent.json", &bad) == DSW_ERR_CONFIG);
  dsw_model_destroy(nullptr);
}

TEST_CASE("chains and estimators") {
  dsw_model* m = nullptr;
  REQUIRE(dsw_model_finite_json(dsweep::fixtures::kDaModel, &m) == DSW_OK);
  int flags = 0;
  REQUIRE(dsw_model_info(m, nullptr, nullptr, nullptr, nullptr, &flags) == DSW_OK);
  CHECK(flags == (DSW_FLAG_GIBBS | DSW_FLAG_DATA_AUGMENTATION));

  dsw_trace* t = nullptr;
  REQUIRE(dsw_run_chain(m, 0, 5000, nullptr, 7, 0, &t) == DSW_OK);
  CHECK(dsw_trace_size(t) == 5000);
  double emp = 0, rb = 0, lwk = 0, cv0 = 0, cv1 = 0, gen = 0;
  REQUIRE(dsw_estimate_empirical(t, &emp) == DSW_OK);
  REQUIRE(dsw_estimate_rb(t, &rb) == DSW_OK);
  REQUIRE(dsw_estimate_lwk(t, &lwk) == DSW_OK);
  const double zero = 0.0, one = 1.0;
  REQUIRE(dsw_estimate_fixed_cv(t, &zero, &cv0) == DSW_OK);
  REQUIRE(dsw_estimate_fixed_cv(t, &one, &cv1) == DSW_OK);
  const double same[2] = {1.0, 1.0};
  REQUIRE(dsw_estimate_general_cv(t, same, &gen) == DSW_OK);
  CHECK(cv0 == emp);
  CHECK(cv1 == rb);
  CHECK(gen == cv1);
  CHECK(std::abs(emp) < 0.2);

  double w[2] = {0, 0};
  REQUIRE(dsw_estimate_weights(t, DSW_WEIGHTS_FIXED_GIBBS, 0, 0, w, 1) == DSW_OK);
  CHECK(std::isfinite(w[0]));
  REQUIRE(dsw_estimate_weights(t, DSW_WEIGHTS_PER_KERNEL_BATCH, 4, 0, w, 2) == DSW_OK);
  CHECK(dsw_estimate_weights(t, DSW_WEIGHTS_PER_KERNEL_BATCH, 4, 0, w, 1) ==
        DSW_ERR_INVALID_ARGUMENT);
  CHECK(dsw_estimate_weights(t, 9, 4, 0, w, 2) == DSW_ERR_INVALID_ARGUMENT);

  // Equal arguments reproduce the chain.
  dsw_trace* t2 = nullptr;
  REQUIRE(dsw_run_chain(m, 0, 5000, nullptr, 7, 0, &t2) == DSW_OK);
  double emp2 = 0;
  REQUIRE(dsw_estimate_empirical(t2, &emp2) == DSW_OK);
  CHECK(emp2 == emp);
  dsw_trace_destroy(t2);

  dsw_trace* random = nullptr;
  REQUIRE(dsw_run_chain(m, 1, 100, nullptr, 7, 0, &random) == DSW_OK);
  CHECK(dsw_estimate_general_cv(random, same, &gen) == DSW_ERR_UNSUPPORTED);
  dsw_trace_destroy(random);

  const double bad_init = 17.0;
  dsw_trace* none = nullptr;
  CHECK(dsw_run_chain(m, 0, 10, &bad_init, 1, 0, &none) == DSW_ERR_CONFIG);
  CHECK(dsw_run_chain(m, 0, 0, nullptr, 1, 0, &none) == DSW_ERR_CONFIG);
  CHECK(none == nullptr);
  dsw_trace_destroy(t);
  dsw_model_destroy(m);

  dsw_model* sum = nullptr;
  REQUIRE(dsw_model_bvn(0.5, "sum", &sum) == DSW_OK);
  REQUIRE(dsw_run_chain(sum, 0, 100, nullptr, 1, 0, &t) == DSW_OK);
  CHECK(dsw_estimate_lwk(t, &lwk) == DSW_ERR_CONFIG);
  dsw_trace_destroy(t);
  dsw_model_destroy(sum);
}

TEST_CASE("oracle report and experiment runs") {
  const auto model = write_file("da.json", dsweep::fixtures::kDaModel);
  char* report = nullptr;
  REQUIRE(dsw_oracle_report(model.c_str(), &report) == DSW_OK);
  CHECK(std::string(report).find("\"SigmaLWK\"") != std::string::npos);
  dsw_free_string(report);
  const auto broken = write_file("broken.json", dsweep::fixtures::kBrokenModel);
  CHECK(dsw_oracle_report(broken.c_str(), &report) == DSW_ERR_CERTIFICATION);

  const auto config = write_file(
      "sim.json", R"({"model": {"type": "finite", "path": "da.json"},
                      "estimators": ["empirical", "rb", "lwk", "general"],
                      "M": 200, "reps": 4, "master_seed": 3})");
  char* csv = nullptr;
  REQUIRE(dsw_simulate(config.c_str(), nullptr, 0, 0, &csv) == DSW_OK);
  const std::string first(csv);
  dsw_free_string(csv);
  CHECK(first.rfind("model,param,estimator,B,M,reps,mean_of_estimates,mse,var_of_estimates,wall_ms\n", 0) ==
        0);
  const uint64_t seed = 11;
  REQUIRE(dsw_simulate(config.c_str(), &seed, 0, 2, &csv) == DSW_OK);
  CHECK(std::string(csv) != first);
  dsw_free_string(csv);

  const auto batch = write_file(
      "batch.json", R"({"model": {"type": "finite", "path": "da.json"},
                        "estimators": ["fixed_batch"], "M": 100, "reps": 2})");
  const size_t grid[3] = {0, 1, 3};
  REQUIRE(dsw_batch_sweep(batch.c_str(), grid, 3, 0, 1, &csv) == DSW_OK);
  int lines = 0;
  for (const char* c = csv; *c; ++c) lines += *c == '\n';
  CHECK(lines == 1 + 3 + 2);
  dsw_free_string(csv);
  CHECK(dsw_batch_sweep(config.c_str(), grid, 3, 0, 1, &csv) == DSW_ERR_CONFIG);
  CHECK(dsw_simulate("/nonexistent.json", nullptr, 0, 0, &csv) == DSW_ERR_CONFIG);
}
