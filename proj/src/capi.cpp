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

#include "dsweep/dsweep.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "dsweep/errors.hpp"
#include "dsweep/estimators.hpp"
#include "dsweep/harness.hpp"
#include "dsweep/json_io.hpp"
#include "dsweep/models.hpp"
#include "dsweep/oracle.hpp"
#include "dsweep/weights.hpp"

struct dsw_model {
  std::shared_ptr<const dsweep::SweepModel> impl;
};

struct dsw_trace {
  dsweep::Trace impl;
};

namespace {

thread_local std::string last_error;

dsw_status fail(dsw_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Maps the library's exception types onto status codes.
template <typename Fn>
dsw_status guarded(Fn&& fn) {
  try {
    fn();
    return DSW_OK;
  } catch (const dsweep::ConfigError& e) {
    return fail(DSW_ERR_CONFIG, e.what());
  } catch (const dsweep::CertificationError& e) {
    return fail(DSW_ERR_CERTIFICATION, e.what());
  } catch (const dsweep::UnsupportedError& e) {
    return fail(DSW_ERR_UNSUPPORTED, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(DSW_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(DSW_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DSW_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DSW_ERR_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void write_vector(const dsweep::Vector& v, double* out) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v(i);
}

dsweep::Matrix read_matrix(const double* data, std::size_t rows, std::size_t cols) {
  dsweep::Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data[i * cols + j];
    }
  }
  return m;
}

dsw_status wrap_model(std::shared_ptr<const dsweep::SweepModel> m, dsw_model** out) {
  *out = new dsw_model{std::move(m)};
  return DSW_OK;
}

#define DSW_REQUIRE(cond, msg) \
  do {                         \
    if (!(cond)) return fail(DSW_ERR_INVALID_ARGUMENT, msg); \
  } while (0)

}  // namespace

extern "C" {

const char* dsw_version(void) { return "1.0.0"; }

const char* dsw_last_error(void) { return last_error.c_str(); }

const char* dsw_status_name(dsw_status status) {
  switch (status) {
    case DSW_OK: return "ok";
    case DSW_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DSW_ERR_CONFIG: return "configuration error";
    case DSW_ERR_CERTIFICATION: return "certification failure";
    case DSW_ERR_UNSUPPORTED: return "unsupported";
    case DSW_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void dsw_free_string(char* s) { std::free(s); }

dsw_status dsw_model_bvn(double rho, const char* integrand, dsw_model** out) {
  DSW_REQUIRE(integrand != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    const std::string name = integrand;
    dsweep::BvnIntegrand kind;
    if (name == "x2") kind = dsweep::BvnIntegrand::X2;
    else if (name == "quadratic") kind = dsweep::BvnIntegrand::Quadratic;
    else if (name == "sum") kind = dsweep::BvnIntegrand::Sum;
    else throw dsweep::ConfigError("unknown integrand " + name);
    wrap_model(std::make_shared<dsweep::BvnModel>(rho, kind), out);
  });
}

dsw_status dsw_model_ising(int n, double eta, const char* update, const char* sweep,
                           dsw_model** out) {
  DSW_REQUIRE(update != nullptr && sweep != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    const std::string u = update, s = sweep;
    if (u != "gibbs" && u != "metropolis") throw dsweep::ConfigError("unknown update " + u);
    if (s != "checkerboard" && s != "raster") throw dsweep::ConfigError("unknown sweep " + s);
    wrap_model(std::make_shared<dsweep::IsingModel>(
                   n, eta, u == "gibbs" ? dsweep::IsingUpdate::Gibbs : dsweep::IsingUpdate::Metropolis,
                   s == "raster" ? dsweep::IsingSweep::Raster : dsweep::IsingSweep::Checkerboard),
               out);
  });
}

dsw_status dsw_model_finite_json(const char* json_text, dsw_model** out) {
  DSW_REQUIRE(json_text != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    auto m = std::make_shared<dsweep::FiniteModel>(
        dsweep::finite_model_from_json(nlohmann::json::parse(json_text)));
    m->validate();
    wrap_model(std::move(m), out);
  });
}

dsw_status dsw_model_finite_file(const char* path, dsw_model** out) {
  DSW_REQUIRE(path != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    auto m = std::make_shared<dsweep::FiniteModel>(dsweep::load_finite_model(path));
    m->validate();
    wrap_model(std::move(m), out);
  });
}

void dsw_model_destroy(dsw_model* model) { delete model; }

dsw_status dsw_model_info(const dsw_model* model, int* num_kernels, size_t* state_dim,
                          size_t* g_dim, size_t* f_dim, int* flags) {
  DSW_REQUIRE(model != nullptr, "null model");
  const dsweep::SweepModel& m = *model->impl;
  if (num_kernels) *num_kernels = m.num_kernels();
  if (state_dim) *state_dim = m.state_dim();
  if (g_dim) *g_dim = m.g_dim();
  if (f_dim) *f_dim = m.f_dim();
  if (flags) {
    *flags = (m.gibbs_kernels() ? DSW_FLAG_GIBBS : 0) |
             (m.data_augmentation() ? DSW_FLAG_DATA_AUGMENTATION : 0);
  }
  return DSW_OK;
}

dsw_status dsw_run_chain(const dsw_model* model, int random_schedule, size_t steps,
                         const double* init, uint64_t master_seed, uint64_t stream_id,
                         dsw_trace** out) {
  DSW_REQUIRE(model != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    const dsweep::SweepModel& m = *model->impl;
    const dsweep::RngPolicy policy{master_seed, stream_id};
    std::vector<double> x0;
    if (init != nullptr) {
      x0.assign(init, init + m.state_dim());
    } else {
      dsweep::RandomStream rng({master_seed, dsweep::kInitStreamBase + stream_id});
      x0 = m.initial_state(rng);
    }
    const dsweep::SweepSchedule schedule{
        random_schedule ? dsweep::ScheduleKind::Random : dsweep::ScheduleKind::Deterministic,
        m.num_kernels()};
    *out = new dsw_trace{dsweep::run_chain(m, schedule, steps, x0, policy)};
  });
}

void dsw_trace_destroy(dsw_trace* trace) { delete trace; }

size_t dsw_trace_size(const dsw_trace* trace) {
  return trace == nullptr ? 0 : trace->impl.size();
}

dsw_status dsw_estimate_empirical(const dsw_trace* trace, double* out) {
  DSW_REQUIRE(trace != nullptr && out != nullptr, "null argument");
  return guarded([&] { write_vector(dsweep::empirical_mean(trace->impl).mean, out); });
}

dsw_status dsw_estimate_rb(const dsw_trace* trace, double* out) {
  DSW_REQUIRE(trace != nullptr && out != nullptr, "null argument");
  return guarded([&] { write_vector(dsweep::rao_blackwell_mean(trace->impl).mean, out); });
}

dsw_status dsw_estimate_lwk(const dsw_trace* trace, double* out) {
  DSW_REQUIRE(trace != nullptr && out != nullptr, "null argument");
  return guarded([&] { write_vector(dsweep::lwk_mean(trace->impl).mean, out); });
}

dsw_status dsw_estimate_fixed_cv(const dsw_trace* trace, const double* C, double* out) {
  DSW_REQUIRE(trace != nullptr && C != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    const auto& layout = trace->impl.layout();
    write_vector(
        dsweep::fixed_cv_mean(trace->impl, read_matrix(C, layout.f_dim, layout.g_dim)).mean,
        out);
  });
}

dsw_status dsw_estimate_general_cv(const dsw_trace* trace, const double* weights,
                                   double* out) {
  DSW_REQUIRE(trace != nullptr && weights != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    const auto& layout = trace->impl.layout();
    const std::size_t block = layout.f_dim * layout.g_dim;
    std::vector<dsweep::Matrix> C;
    for (int k = 0; k < layout.num_kernels; ++k) {
      C.push_back(read_matrix(weights + static_cast<std::size_t>(k) * block, layout.f_dim,
                              layout.g_dim));
    }
    write_vector(dsweep::general_cv_mean(trace->impl, C).mean, out);
  });
}

dsw_status dsw_estimate_weights(const dsw_trace* trace, int mode, size_t B,
                                int force_gibbs_v, double* out, size_t capacity) {
  DSW_REQUIRE(trace != nullptr && out != nullptr, "null argument");
  dsweep::MomentMode m;
  switch (mode) {
    case DSW_WEIGHTS_FIXED_GIBBS: m = dsweep::MomentMode::FixedGibbs; break;
    case DSW_WEIGHTS_FIXED_BATCH: m = dsweep::MomentMode::FixedBatch; break;
    case DSW_WEIGHTS_PER_KERNEL_BATCH: m = dsweep::MomentMode::PerKernelBatch; break;
    default: return fail(DSW_ERR_INVALID_ARGUMENT, "unknown weight mode");
  }
  const auto& layout = trace->impl.layout();
  const std::size_t count =
      m == dsweep::MomentMode::PerKernelBatch ? static_cast<std::size_t>(layout.num_kernels) : 1;
  DSW_REQUIRE(capacity >= count * layout.f_dim * layout.g_dim, "output buffer too small");
  return guarded([&] {
    const dsweep::WeightSolution w =
        dsweep::solve_weights(dsweep::estimate_moments(trace->impl, m, B, force_gibbs_v != 0));
    double* cursor = out;
    for (const dsweep::Matrix& C : w.C_hat) {
      for (Eigen::Index i = 0; i < C.rows(); ++i) {
        for (Eigen::Index j = 0; j < C.cols(); ++j) *cursor++ = C(i, j);
      }
    }
  });
}

dsw_status dsw_oracle_report(const char* model_path, char** report_json) {
  DSW_REQUIRE(model_path != nullptr && report_json != nullptr, "null argument");
  return guarded([&] {
    const dsweep::FiniteModel model = dsweep::load_finite_model(model_path);
    *report_json = copy_string(dsweep::to_json(dsweep::variance_report(model)).dump(2));
  });
}

dsw_status dsw_simulate(const char* config_path, const uint64_t* seed, int force,
                        size_t workers, char** csv) {
  DSW_REQUIRE(config_path != nullptr && csv != nullptr, "null argument");
  return guarded([&] {
    const dsweep::ExperimentConfig config = dsweep::load_experiment_config(config_path);
    dsweep::RunOptions opts;
    opts.force = force != 0;
    if (seed != nullptr) opts.seed = *seed;
    if (workers > 0) opts.workers = workers;
    *csv = copy_string(dsweep::to_csv(dsweep::run_experiment(config, opts)));
  });
}

dsw_status dsw_batch_sweep(const char* config_path, const size_t* b_grid, size_t b_count,
                           int force, size_t workers, char** csv) {
  DSW_REQUIRE(config_path != nullptr && csv != nullptr, "null argument");
  DSW_REQUIRE(b_grid != nullptr || b_count == 0, "null B grid");
  return guarded([&] {
    const dsweep::ExperimentConfig config = dsweep::load_experiment_config(config_path);
    dsweep::RunOptions opts;
    opts.force = force != 0;
    if (workers > 0) opts.workers = workers;
    const std::vector<std::size_t> grid(b_grid, b_grid + b_count);
    *csv = copy_string(dsweep::to_csv(dsweep::batch_sweep(config, grid, opts)));
  });
}

}  // extern "C"
