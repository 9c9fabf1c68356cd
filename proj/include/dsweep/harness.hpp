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

// Replicated simulation studies: for every grid point and estimator, run
// `reps` independent chains and report the MSE against a reference mean.
//
// Replication r uses RngPolicy{master_seed, r} for the chain and
// RngPolicy{master_seed, kInitStreamBase + r} for its initial state, so the
// output does not depend on the number of workers.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsweep/models.hpp"
#include "dsweep/sweep.hpp"
#include "dsweep/weights.hpp"

namespace dsweep {

inline constexpr std::uint64_t kInitStreamBase = std::uint64_t{1} << 62;
inline constexpr std::uint64_t kReferenceStreamBase = std::uint64_t{1} << 63;
inline constexpr double kBudgetSteps = 1e9;

enum class ModelFamily { Bvn, Ising, Finite };
enum class EstimatorKind { Empirical, Rb, Lwk, Fixed, FixedBatch, General };
enum class ReferenceMode { Analytic, Enumeration, LongRun };
enum class VMode { Gibbs, Batch };

std::string estimator_name(EstimatorKind kind);

struct ExperimentConfig {
  ModelFamily family = ModelFamily::Bvn;
  // bvn
  std::vector<double> rho_grid;
  BvnIntegrand integrand = BvnIntegrand::X2;
  // ising
  int ising_n = 3;
  std::vector<double> eta_grid;
  IsingUpdate update = IsingUpdate::Gibbs;
  IsingSweep sweep = IsingSweep::Checkerboard;
  // finite
  std::filesystem::path finite_path;
  std::size_t max_states = kDefaultMaxStates;

  std::vector<EstimatorKind> estimators;
  std::optional<std::size_t> B;  // default 5 sweeps = 5K steps
  VMode v_mode = VMode::Gibbs;   // V estimate behind the "fixed" estimator
  bool force_gibbs_v = false;    // allow the Gibbs shortcut on other kernels
  std::size_t M = 0;       // draws per replication, or
  std::size_t sweeps = 0;  // full sweeps per replication (M = sweeps * K)
  std::size_t reps = 1;
  std::uint64_t master_seed = 0;
  ReferenceMode reference = ReferenceMode::Analytic;
  std::size_t long_run_cycles = 100000;
  std::size_t workers = 1;
  std::uint64_t burn_in = 0;
  ScheduleKind schedule = ScheduleKind::Deterministic;
};

// Parses the JSON config; relative model paths resolve against base_dir.
// Grid defaults: rho in {-0.9, -0.7, ..., 0.9}, eta in {0.1, 0.2, 0.3, 0.4}.
// Either "M" (draws) or "sweeps" (M = sweeps * K) must be given.
ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct MseRow {
  std::string model;
  std::string param;
  std::string estimator;
  std::optional<std::size_t> B;
  std::size_t M = 0;
  std::size_t reps = 0;
  double mean_of_estimates = 0.0;
  double mse = 0.0;
  double var_of_estimates = 0.0;  // population variance over reps
  double wall_ms = 0.0;
  double reference = 0.0;
  std::vector<double> values;  // one estimate per replication
};

struct MseReport {
  std::vector<MseRow> rows;
};

struct RunOptions {
  bool force = false;                       // skip the budget guard
  std::optional<std::uint64_t> seed;        // overrides master_seed
  std::optional<std::size_t> workers;       // overrides config workers
};

// Validates the whole config (ConfigError) before any sampling.
MseReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// fixed_batch rows for each B in b_grid, plus rb and fixed (Gibbs-shortcut V)
// reference rows with an empty B, all from the same traces.
MseReport batch_sweep(const ExperimentConfig& config, const std::vector<std::size_t>& b_grid,
                      const RunOptions& options = {});

// Reference mean per grid point, one entry per component of g.
std::vector<Vector> reference_means(const ExperimentConfig& config);

// Total kernel applications the config asks for.
double planned_steps(const ExperimentConfig& config);

// Header plus one line per row; doubles at 17 significant digits.
void write_csv(std::ostream& out, const MseReport& report);
std::string to_csv(const MseReport& report);

}  // namespace dsweep
