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

#include "dsweep/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "dsweep/errors.hpp"
#include "dsweep/estimators.hpp"
#include "dsweep/json_io.hpp"

namespace dsweep {

using nlohmann::json;

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Shortest text that parses back to v; grid labels read as written.
std::string format_param(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<double> default_rho_grid() {
  std::vector<double> grid;
  for (int i = -9; i <= 9; i += 2) grid.push_back(i / 10.0);
  return grid;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key \"") + key + "\": " + e.what());
  }
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) {
      throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
  }
}

EstimatorKind parse_estimator(const std::string& name) {
  if (name == "empirical") return EstimatorKind::Empirical;
  if (name == "rb") return EstimatorKind::Rb;
  if (name == "lwk") return EstimatorKind::Lwk;
  if (name == "fixed") return EstimatorKind::Fixed;
  if (name == "fixed_batch") return EstimatorKind::FixedBatch;
  if (name == "general") return EstimatorKind::General;
  throw ConfigError("unknown estimator \"" + name + "\"");
}

BvnIntegrand parse_integrand(const std::string& name) {
  if (name == "x2") return BvnIntegrand::X2;
  if (name == "quadratic") return BvnIntegrand::Quadratic;
  if (name == "sum") return BvnIntegrand::Sum;
  throw ConfigError("unknown bvn integrand \"" + name + "\" (x2, quadratic, sum)");
}

void parse_model(const json& jm, const std::filesystem::path& base_dir,
                 ExperimentConfig& c) {
  if (!jm.is_object()) throw ConfigError("\"model\" must be an object");
  std::string type;
  json body;
  if (jm.contains("type")) {
    type = jm.at("type").get<std::string>();
    body = jm;
    body.erase("type");
  } else if (jm.size() == 1) {
    type = jm.begin().key();
    body = jm.begin().value();
  } else {
    throw ConfigError("\"model\" needs a \"type\" of bvn, ising or finite");
  }
  if (!body.is_object()) throw ConfigError("model parameters must be an object");

  if (type == "bvn") {
    reject_unknown_keys(body, {"rho_grid", "integrand"}, "bvn model");
    c.family = ModelFamily::Bvn;
    c.rho_grid = get_or(body, "rho_grid", default_rho_grid());
    c.integrand = parse_integrand(get_or<std::string>(body, "integrand", "x2"));
  } else if (type == "ising") {
    reject_unknown_keys(body, {"n", "eta_grid", "update", "sweep"}, "ising model");
    c.family = ModelFamily::Ising;
    c.ising_n = get_or(body, "n", 3);
    c.eta_grid = get_or(body, "eta_grid", std::vector<double>{0.1, 0.2, 0.3, 0.4});
    const auto update = get_or<std::string>(body, "update", "gibbs");
    if (update == "gibbs") c.update = IsingUpdate::Gibbs;
    else if (update == "metropolis") c.update = IsingUpdate::Metropolis;
    else throw ConfigError("ising update must be gibbs or metropolis");
    const auto sweep = get_or<std::string>(body, "sweep", "checkerboard");
    if (sweep == "checkerboard") c.sweep = IsingSweep::Checkerboard;
    else if (sweep == "raster") c.sweep = IsingSweep::Raster;
    else throw ConfigError("ising sweep must be checkerboard or raster");
  } else if (type == "finite") {
    reject_unknown_keys(body, {"path", "max_states"}, "finite model");
    c.family = ModelFamily::Finite;
    if (!body.contains("path")) throw ConfigError("finite model needs a \"path\"");
    std::filesystem::path p = body.at("path").get<std::string>();
    c.finite_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    c.max_states = get_or<std::size_t>(body, "max_states", kDefaultMaxStates);
  } else {
    throw ConfigError("unknown model type \"" + type + "\"");
  }
}

// --- grid points -----------------------------------------------------------

struct GridPoint {
  std::shared_ptr<const SweepModel> model;
  std::string param;
  std::size_t M = 0;
};

std::vector<GridPoint> build_grid(const ExperimentConfig& c) {
  std::vector<GridPoint> grid;
  auto steps_for = [&](const SweepModel& m) {
    return c.M > 0 ? c.M : c.sweeps * static_cast<std::size_t>(m.num_kernels());
  };
  switch (c.family) {
    case ModelFamily::Bvn:
      if (c.rho_grid.empty()) throw ConfigError("rho_grid is empty");
      for (double rho : c.rho_grid) {
        auto m = std::make_shared<BvnModel>(rho, c.integrand);
        grid.push_back({m, format_param(rho), steps_for(*m)});
      }
      break;
    case ModelFamily::Ising:
      if (c.eta_grid.empty()) throw ConfigError("eta_grid is empty");
      for (double eta : c.eta_grid) {
        auto m = std::make_shared<IsingModel>(c.ising_n, eta, c.update, c.sweep);
        grid.push_back({m, format_param(eta), steps_for(*m)});
      }
      break;
    case ModelFamily::Finite: {
      auto m = std::make_shared<FiniteModel>(load_finite_model(c.finite_path, c.max_states));
      m->validate();
      grid.push_back({m, "", steps_for(*m)});
      break;
    }
  }
  return grid;
}

// One output column: an estimator plus the lag it was run with.
struct Column {
  EstimatorKind kind;
  std::optional<std::size_t> B;
  VMode v_mode = VMode::Gibbs;
  bool force_gibbs_v = false;
};

std::size_t resolved_B(const ExperimentConfig& c, const SweepModel& m) {
  return c.B ? *c.B : 5 * static_cast<std::size_t>(m.num_kernels());
}

std::vector<Column> experiment_columns(const ExperimentConfig& c, const SweepModel& m) {
  std::vector<Column> cols;
  const std::size_t B = resolved_B(c, m);
  for (EstimatorKind kind : c.estimators) {
    switch (kind) {
      case EstimatorKind::Fixed:
        cols.push_back({kind, c.v_mode == VMode::Batch ? std::optional(B) : std::nullopt,
                        c.v_mode, c.force_gibbs_v});
        break;
      case EstimatorKind::FixedBatch:
      case EstimatorKind::General:
        cols.push_back({kind, B, VMode::Batch, false});
        break;
      default:
        cols.push_back({kind, std::nullopt, VMode::Gibbs, false});
    }
  }
  return cols;
}

void check_column(const ExperimentConfig& c, const SweepModel& m, const Column& col,
                  std::size_t M) {
  const std::size_t K = static_cast<std::size_t>(m.num_kernels());
  switch (col.kind) {
    case EstimatorKind::Lwk:
      if (!m.data_augmentation()) {
        throw ConfigError("estimator lwk needs a two-kernel data-augmentation model; " +
                          m.name() + " is not one");
      }
      break;
    case EstimatorKind::Fixed:
      if (M < 2) throw ConfigError("estimator fixed needs M >= 2");
      if (col.v_mode == VMode::Gibbs && !m.gibbs_kernels() && !col.force_gibbs_v) {
        throw ConfigError("estimator fixed with v_mode gibbs needs Gibbs kernels (" +
                          m.name() + "); use v_mode batch or set force_gibbs_v");
      }
      break;
    case EstimatorKind::FixedBatch:
      if (M < 2) throw ConfigError("estimator fixed_batch needs M >= 2");
      break;
    case EstimatorKind::General:
      if (c.schedule != ScheduleKind::Deterministic) {
        throw ConfigError("estimator general needs a deterministic sweep");
      }
      if (M < 2 * K) throw ConfigError("estimator general needs at least two full sweeps");
      break;
    default: break;
  }
}

Vector estimate(const Trace& trace, const Column& col) {
  switch (col.kind) {
    case EstimatorKind::Empirical: return empirical_mean(trace).mean;
    case EstimatorKind::Rb: return rao_blackwell_mean(trace).mean;
    case EstimatorKind::Lwk: return lwk_mean(trace).mean;
    case EstimatorKind::Fixed:
    case EstimatorKind::FixedBatch: {
      const MomentMode mode = col.kind == EstimatorKind::Fixed && col.v_mode == VMode::Gibbs
                                  ? MomentMode::FixedGibbs
                                  : MomentMode::FixedBatch;
      const WeightSolution w =
          solve_weights(estimate_moments(trace, mode, col.B.value_or(0), col.force_gibbs_v));
      return fixed_cv_mean(trace, w.C_hat[0]).mean;
    }
    case EstimatorKind::General: {
      const WeightSolution w = solve_weights(
          estimate_moments(trace, MomentMode::PerKernelBatch, col.B.value_or(0)));
      return general_cv_mean(trace, w.C_hat).mean;
    }
  }
  throw ConfigError("unknown estimator");
}

void validate_common(const ExperimentConfig& c) {
  if (c.reps < 1) throw ConfigError("reps must be >= 1");
  if (c.M == 0 && c.sweeps == 0) throw ConfigError("config needs \"M\" or \"sweeps\"");
  if (c.M > 0 && c.sweeps > 0) throw ConfigError("give either \"M\" or \"sweeps\", not both");
}

Vector long_run_reference(const ExperimentConfig& c, const SweepModel& model,
                          std::size_t index) {
  std::unique_ptr<SweepModel> ising;
  const SweepModel* runner = &model;
  if (c.family == ModelFamily::Ising) {
    ising = std::make_unique<IsingModel>(c.ising_n, static_cast<const IsingModel&>(model).eta(),
                                         IsingUpdate::Gibbs, IsingSweep::Checkerboard);
    runner = ising.get();
  }
  const SweepSchedule schedule{ScheduleKind::Deterministic, runner->num_kernels()};
  RandomStream init_rng(RngPolicy{c.master_seed, kReferenceStreamBase + kInitStreamBase + index});
  const std::vector<double> init = runner->initial_state(init_rng);
  ChainOptions opts;
  opts.keep_states = false;
  opts.burn_in = c.burn_in;
  const std::size_t steps = c.long_run_cycles * static_cast<std::size_t>(runner->num_kernels());
  const Trace trace = run_chain(*runner, schedule, steps, init,
                                RngPolicy{c.master_seed, kReferenceStreamBase + index}, opts);
  return rao_blackwell_mean(trace).mean;
}

Vector reference_for(const ExperimentConfig& c, const SweepModel& model, std::size_t index) {
  const auto d = static_cast<Eigen::Index>(model.g_dim());
  switch (c.reference) {
    case ReferenceMode::Analytic:
      if (c.family == ModelFamily::Ising) {
        throw ConfigError("no analytic reference for the Ising model; use enumeration "
                          "or long_run");
      }
      // Built-in normal integrands and centered finite tables have mean 0.
      return Vector::Zero(d);
    case ReferenceMode::Enumeration:
      if (c.family == ModelFamily::Bvn) {
        throw ConfigError("enumeration reference needs a finite or Ising model");
      }
      if (c.family == ModelFamily::Ising) {
        if (c.ising_n > 4) {
          throw ConfigError("enumeration reference supports Ising n <= 4, got n = " +
                            std::to_string(c.ising_n));
        }
        Vector v(1);
        v(0) = ising_exact_mean_T(c.ising_n, static_cast<const IsingModel&>(model).eta());
        return v;
      }
      return Vector::Zero(d);
    case ReferenceMode::LongRun:
      if (c.long_run_cycles == 0) throw ConfigError("long_run needs cycles >= 1");
      return long_run_reference(c, model, index);
  }
  throw ConfigError("unknown reference mode");
}

// Everything needed to run, checked before sampling.
struct Plan {
  std::vector<GridPoint> grid;
  std::vector<std::vector<Column>> columns;  // per grid point
};

template <typename ColumnsFor>
Plan make_plan(const ExperimentConfig& c, const RunOptions& opts, ColumnsFor columns_for) {
  validate_common(c);
  Plan plan;
  plan.grid = build_grid(c);
  for (const GridPoint& gp : plan.grid) {
    const std::size_t K = static_cast<std::size_t>(gp.model->num_kernels());
    if (gp.M < K) {
      throw ConfigError("M must be at least the number of kernels (" + std::to_string(K) + ")");
    }
    auto cols = columns_for(*gp.model);
    if (cols.empty()) throw ConfigError("no estimators requested");
    for (const Column& col : cols) check_column(c, *gp.model, col, gp.M);
    plan.columns.push_back(std::move(cols));
  }
  if (c.reference == ReferenceMode::Enumeration && c.family == ModelFamily::Ising &&
      c.ising_n > 4) {
    throw ConfigError("enumeration reference supports Ising n <= 4");
  }
  if (!opts.force && planned_steps(c) > kBudgetSteps) {
    throw ConfigError("config plans " + format_double(planned_steps(c)) +
                      " kernel applications, above the 1e9 budget; pass --force to run");
  }
  return plan;
}

MseReport execute(const ExperimentConfig& config, const RunOptions& opts, const Plan& plan) {
  ExperimentConfig c = config;
  if (opts.seed) c.master_seed = *opts.seed;
  const std::size_t workers = std::max<std::size_t>(1, opts.workers.value_or(c.workers));
  const std::size_t G = plan.grid.size();
  const std::size_t R = c.reps;

  std::vector<Vector> refs;
  for (std::size_t g = 0; g < G; ++g) refs.push_back(reference_for(c, *plan.grid[g].model, g));

  // results[g][r][column] = estimate; elapsed[g][r] in ms.
  std::vector<std::vector<std::vector<Vector>>> results(
      G, std::vector<std::vector<Vector>>(R));
  std::vector<std::vector<double>> elapsed(G, std::vector<double>(R, 0.0));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= G * R) return;
      const std::size_t g = task / R, r = task % R;
      try {
        const auto start = std::chrono::steady_clock::now();
        const GridPoint& gp = plan.grid[g];
        const SweepSchedule schedule{c.schedule, gp.model->num_kernels()};
        RandomStream init_rng(RngPolicy{c.master_seed, kInitStreamBase + r});
        const std::vector<double> init = gp.model->initial_state(init_rng);
        ChainOptions chain_opts;
        chain_opts.keep_states = false;
        chain_opts.burn_in = c.burn_in;
        const Trace trace = run_chain(*gp.model, schedule, gp.M, init,
                                      RngPolicy{c.master_seed, r}, chain_opts);
        for (const Column& col : plan.columns[g]) results[g][r].push_back(estimate(trace, col));
        elapsed[g][r] = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(G * R);
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < std::min(workers, G * R); ++i) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  MseReport report;
  for (std::size_t g = 0; g < G; ++g) {
    const GridPoint& gp = plan.grid[g];
    double wall = 0.0;
    for (double ms : elapsed[g]) wall += ms;
    const std::size_t d = gp.model->g_dim();
    for (std::size_t ci = 0; ci < plan.columns[g].size(); ++ci) {
      const Column& col = plan.columns[g][ci];
      for (std::size_t j = 0; j < d; ++j) {
        MseRow row;
        row.model = gp.model->name();
        row.param = gp.param;
        row.estimator = estimator_name(col.kind);
        if (d > 1) row.estimator += "[" + std::to_string(j) + "]";
        row.B = col.B;
        row.M = gp.M;
        row.reps = R;
        row.reference = refs[g](static_cast<Eigen::Index>(j));
        row.wall_ms = wall;
        double sum = 0.0;
        for (std::size_t r = 0; r < R; ++r) {
          row.values.push_back(results[g][r][ci](static_cast<Eigen::Index>(j)));
          sum += row.values.back();
        }
        row.mean_of_estimates = sum / static_cast<double>(R);
        double var = 0.0, mse = 0.0;
        for (double v : row.values) {
          var += (v - row.mean_of_estimates) * (v - row.mean_of_estimates);
          mse += (v - row.reference) * (v - row.reference);
        }
        row.var_of_estimates = var / static_cast<double>(R);
        row.mse = mse / static_cast<double>(R);
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

}  // namespace

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Empirical: return "empirical";
    case EstimatorKind::Rb: return "rb";
    case EstimatorKind::Lwk: return "lwk";
    case EstimatorKind::Fixed: return "fixed";
    case EstimatorKind::FixedBatch: return "fixed_batch";
    case EstimatorKind::General: return "general";
  }
  return "?";
}

ExperimentConfig parse_experiment_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown_keys(j,
                      {"model", "estimators", "weights", "M", "sweeps", "reps",
                       "master_seed", "reference", "workers", "burn_in", "schedule"},
                      "config");
  ExperimentConfig c;
  if (!j.contains("model")) throw ConfigError("config needs a \"model\"");
  parse_model(j.at("model"), base_dir, c);

  if (!j.contains("estimators") || !j.at("estimators").is_array()) {
    throw ConfigError("config needs an \"estimators\" list");
  }
  for (const json& e : j.at("estimators")) {
    if (!e.is_string()) throw ConfigError("estimator names must be strings");
    c.estimators.push_back(parse_estimator(e.get<std::string>()));
  }

  if (j.contains("weights")) {
    const json& w = j.at("weights");
    if (!w.is_object()) throw ConfigError("\"weights\" must be an object");
    reject_unknown_keys(w, {"B", "v_mode", "force_gibbs_v"}, "weights");
    if (w.contains("B")) {
      const long long B = get_or<long long>(w, "B", 0);
      if (B < 0) throw ConfigError("weights.B must be >= 0");
      c.B = static_cast<std::size_t>(B);
    }
    const auto mode = get_or<std::string>(w, "v_mode", "gibbs");
    if (mode == "gibbs") c.v_mode = VMode::Gibbs;
    else if (mode == "batch") c.v_mode = VMode::Batch;
    else throw ConfigError("weights.v_mode must be gibbs or batch");
    c.force_gibbs_v = get_or(w, "force_gibbs_v", false);
  }

  const long long M = get_or<long long>(j, "M", 0);
  const long long sweeps = get_or<long long>(j, "sweeps", 0);
  const long long reps = get_or<long long>(j, "reps", 1);
  if (M < 0 || sweeps < 0) throw ConfigError("M and sweeps must be positive");
  if (reps < 1) throw ConfigError("reps must be >= 1");
  c.M = static_cast<std::size_t>(M);
  c.sweeps = static_cast<std::size_t>(sweeps);
  c.reps = static_cast<std::size_t>(reps);
  c.master_seed = get_or<std::uint64_t>(j, "master_seed", 0);
  c.workers = get_or<std::size_t>(j, "workers", 1);
  c.burn_in = get_or<std::uint64_t>(j, "burn_in", 0);
  const auto schedule = get_or<std::string>(j, "schedule", "deterministic");
  if (schedule == "deterministic") c.schedule = ScheduleKind::Deterministic;
  else if (schedule == "random") c.schedule = ScheduleKind::Random;
  else throw ConfigError("schedule must be deterministic or random");

  c.reference = c.family == ModelFamily::Ising ? ReferenceMode::Enumeration
                                               : ReferenceMode::Analytic;
  if (j.contains("reference")) {
    const json& r = j.at("reference");
    std::string mode;
    if (r.is_string()) {
      mode = r.get<std::string>();
    } else if (r.is_object()) {
      reject_unknown_keys(r, {"mode", "cycles"}, "reference");
      mode = get_or<std::string>(r, "mode", "");
      c.long_run_cycles = get_or<std::size_t>(r, "cycles", c.long_run_cycles);
    } else {
      throw ConfigError("\"reference\" must be a string or an object");
    }
    if (mode == "analytic") c.reference = ReferenceMode::Analytic;
    else if (mode == "enumeration") c.reference = ReferenceMode::Enumeration;
    else if (mode == "long_run") c.reference = ReferenceMode::LongRun;
    else throw ConfigError("reference must be analytic, enumeration or long_run");
  }
  validate_common(c);
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_experiment_config(j, path.parent_path());
}

double planned_steps(const ExperimentConfig& c) {
  double points = 1.0;
  double K = 1.0;
  switch (c.family) {
    case ModelFamily::Bvn:
      points = static_cast<double>(c.rho_grid.size());
      K = 2.0;
      break;
    case ModelFamily::Ising:
      points = static_cast<double>(c.eta_grid.size());
      K = c.sweep == IsingSweep::Raster ? static_cast<double>(c.ising_n) * c.ising_n : 2.0;
      break;
    case ModelFamily::Finite:
      // K is only known after loading; count sweeps as single steps.
      break;
  }
  const double per_rep =
      (c.M > 0 ? static_cast<double>(c.M) : static_cast<double>(c.sweeps) * K) +
      static_cast<double>(c.burn_in);
  double total = points * static_cast<double>(c.reps) * per_rep;
  if (c.reference == ReferenceMode::LongRun) {
    const double ref_k = c.family == ModelFamily::Ising ? 2.0 : K;
    total += points * static_cast<double>(c.long_run_cycles) * ref_k;
  }
  return total;
}

std::vector<Vector> reference_means(const ExperimentConfig& c) {
  std::vector<Vector> refs;
  const std::vector<GridPoint> grid = build_grid(c);
  for (std::size_t g = 0; g < grid.size(); ++g) refs.push_back(reference_for(c, *grid[g].model, g));
  return refs;
}

MseReport run_experiment(const ExperimentConfig& c, const RunOptions& opts) {
  const Plan plan =
      make_plan(c, opts, [&](const SweepModel& m) { return experiment_columns(c, m); });
  return execute(c, opts, plan);
}

MseReport batch_sweep(const ExperimentConfig& c, const std::vector<std::size_t>& b_grid,
                      const RunOptions& opts) {
  if (std::find(c.estimators.begin(), c.estimators.end(), EstimatorKind::FixedBatch) ==
      c.estimators.end()) {
    throw ConfigError("batch-sweep needs the fixed_batch estimator in the config");
  }
  if (b_grid.empty()) throw ConfigError("batch-sweep needs a non-empty B grid");
  const Plan plan = make_plan(c, opts, [&](const SweepModel&) {
    std::vector<Column> cols;
    for (std::size_t B : b_grid) cols.push_back({EstimatorKind::FixedBatch, B, VMode::Batch, false});
    cols.push_back({EstimatorKind::Rb, std::nullopt, VMode::Gibbs, false});
    // The Gibbs-shortcut row is the comparison line even for non-Gibbs kernels.
    cols.push_back({EstimatorKind::Fixed, std::nullopt, VMode::Gibbs, true});
    return cols;
  });
  return execute(c, opts, plan);
}

void write_csv(std::ostream& out, const MseReport& report) {
  out << "model,param,estimator,B,M,reps,mean_of_estimates,mse,var_of_estimates,wall_ms\n";
  for (const MseRow& r : report.rows) {
    out << csv_field(r.model) << ',' << csv_field(r.param) << ',' << csv_field(r.estimator)
        << ',' << (r.B ? std::to_string(*r.B) : std::string()) << ',' << r.M << ','
        << r.reps << ',' << format_double(r.mean_of_estimates) << ','
        << format_double(r.mse) << ',' << format_double(r.var_of_estimates) << ','
        << format_double(r.wall_ms) << '\n';
  }
}

std::string to_csv(const MseReport& report) {
  std::ostringstream out;
  write_csv(out, report);
  return out.str();
}

}  // namespace dsweep
