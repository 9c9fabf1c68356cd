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

// dsweep command line: simulate, batch-sweep, oracle.
// Exit codes: 0 success, 2 configuration error, 3 certification failure,
// 1 anything else.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsweep/dsweep.h"

namespace {

int exit_code(dsw_status status) {
  switch (status) {
    case DSW_OK: return 0;
    case DSW_ERR_CONFIG: return 2;
    case DSW_ERR_CERTIFICATION: return 3;
    default: return 1;
  }
}

int report(dsw_status status) {
  if (status != DSW_OK) {
    std::cerr << "dsweep: " << dsw_status_name(status) << ": " << dsw_last_error() << "\n";
  }
  return exit_code(status);
}

// Takes ownership of text.
int write_output(char* text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (out) out << text;
  dsw_free_string(text);
  if (!out) {
    std::cerr << "dsweep: cannot write " << path << "\n";
    return 2;
  }
  return 0;
}

std::vector<std::size_t> parse_b_grid(const std::string& text) {
  std::vector<std::size_t> grid;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    long long v = -1;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v < 0) {
      throw CLI::ValidationError("--b-grid", "expected comma-separated integers >= 0");
    }
    grid.push_back(static_cast<std::size_t>(v));
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Control variates for deterministic-sweep MCMC"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dsw_version());

  std::string config, out, model, b_grid_text = "0,1,2,4,8,16";
  std::uint64_t seed = 0;
  bool force = false;
  std::size_t workers = 0;

  CLI::App* simulate = app.add_subcommand("simulate", "Run a replicated MSE study");
  simulate->add_option("--config", config, "Experiment config (JSON)")->required();
  simulate->add_option("--out", out, "Output CSV")->required();
  CLI::Option* seed_opt = simulate->add_option("--seed", seed, "Override master_seed");
  simulate->add_flag("--force", force, "Skip the 1e9-step budget guard");
  simulate->add_option("--workers", workers, "Worker threads (default: config)");

  CLI::App* sweep = app.add_subcommand("batch-sweep", "MSE of fixed_batch over a B grid");
  sweep->add_option("--config", config, "Experiment config (JSON)")->required();
  sweep->add_option("--b-grid", b_grid_text, "Comma-separated batch lags")
      ->capture_default_str();
  sweep->add_option("--out", out, "Output CSV")->required();
  sweep->add_flag("--force", force, "Skip the 1e9-step budget guard");
  sweep->add_option("--workers", workers, "Worker threads (default: config)");

  CLI::App* oracle = app.add_subcommand("oracle", "Exact variance report for a finite model");
  oracle->add_option("--model", model, "Finite model (JSON)")->required();
  oracle->add_option("--out", out, "Output JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  char* text = nullptr;
  dsw_status status = DSW_OK;
  if (*simulate) {
    status = dsw_simulate(config.c_str(), seed_opt->count() > 0 ? &seed : nullptr,
                          force ? 1 : 0, workers, &text);
  } else if (*sweep) {
    std::vector<std::size_t> grid;
    try {
      grid = parse_b_grid(b_grid_text);
    } catch (const CLI::ValidationError& e) {
      std::cerr << "dsweep: " << e.what() << "\n";
      return 2;
    }
    status = dsw_batch_sweep(config.c_str(), grid.data(), grid.size(), force ? 1 : 0,
                             workers, &text);
  } else if (*oracle) {
    status = dsw_oracle_report(model.c_str(), &text);
  }
  if (status != DSW_OK) return report(status);
  return write_output(text, out);
}
