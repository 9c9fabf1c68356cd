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

#include "dsweep/sweep.hpp"

#include <algorithm>

#include "dsweep/errors.hpp"

namespace dsweep {

namespace {

void check_kernel(KernelIndex k, int num_kernels) {
  if (num_kernels < 1) throw ConfigError("number of kernels must be >= 1");
  if (k.value() < 1 || k.value() > num_kernels) {
    throw ConfigError("kernel index " + std::to_string(k.value()) +
                      " outside 1.." + std::to_string(num_kernels));
  }
}

std::span<const double> row(const std::vector<double>& data, std::size_t width,
                            std::size_t t) {
  return {data.data() + t * width, width};
}

void push(std::vector<double>& data, std::span<const double> values,
          std::size_t width, const char* what) {
  if (values.size() != width) {
    throw ConfigError(std::string("trace append: ") + what +
                      " has wrong dimension");
  }
  data.insert(data.end(), values.begin(), values.end());
}

}  // namespace

KernelIndex sigma(KernelIndex k, int num_kernels) {
  check_kernel(k, num_kernels);
  return k.value() < num_kernels ? KernelIndex(k.value() + 1) : KernelIndex(1);
}

KernelIndex sigma_power(KernelIndex k, std::uint64_t t, int num_kernels) {
  check_kernel(k, num_kernels);
  const auto K = static_cast<std::uint64_t>(num_kernels);
  return KernelIndex(static_cast<int>((k.slot() + t % K) % K) + 1);
}

KernelIndex kernel_at_step(const SweepSchedule& schedule, std::uint64_t t,
                           RandomStream& rng) {
  if (schedule.num_kernels < 1) {
    throw ConfigError("number of kernels must be >= 1");
  }
  const auto K = static_cast<std::uint64_t>(schedule.num_kernels);
  if (schedule.kind == ScheduleKind::Deterministic) {
    return KernelIndex(static_cast<int>(t % K) + 1);
  }
  return KernelIndex(static_cast<int>(rng.below(K)) + 1);
}

void SweepModel::first_kernel_cond_g(std::span<const double>,
                                     std::span<double>) const {
  throw UnsupportedError(name() + " does not declare data augmentation");
}

Trace::Trace(TraceLayout layout, RngPolicy policy)
    : layout_(layout), policy_(policy) {
  if (layout_.num_kernels < 1) throw ConfigError("trace needs K >= 1");
  if (layout_.g_dim == 0) throw ConfigError("trace needs g dimension >= 1");
}

void Trace::reserve(std::size_t steps) {
  kernel_at_.reserve(steps);
  g_.reserve(steps * layout_.g_dim);
  cond_g_.reserve(steps * layout_.g_dim);
  f_.reserve(steps * layout_.f_dim);
  cond_f_.reserve(steps * layout_.f_dim);
}

void Trace::append(KernelIndex k, std::span<const double> state,
                   std::span<const double> g, std::span<const double> f,
                   std::span<const double> cond_g,
                   std::span<const double> cond_f,
                   std::span<const double> first_cond_g) {
  check_kernel(k, layout_.num_kernels);
  if (layout_.schedule == ScheduleKind::Deterministic) {
    const auto expected = static_cast<int>(
        kernel_at_.size() % static_cast<std::size_t>(layout_.num_kernels)) + 1;
    if (k.value() != expected) {
      throw ConfigError("deterministic trace: kernel out of sweep order");
    }
  }
  // States are all-or-nothing across the trace.
  if (kernel_at_.empty() || has_states()) {
    if (!state.empty()) push(states_, state, layout_.state_dim, "state");
  }
  push(g_, g, layout_.g_dim, "g");
  push(f_, f, layout_.f_dim, "f");
  push(cond_g_, cond_g, layout_.g_dim, "cond_g");
  push(cond_f_, cond_f, layout_.f_dim, "cond_f");
  if (layout_.data_augmentation) {
    push(first_cond_g_, first_cond_g, layout_.g_dim, "first_cond_g");
  }
  kernel_at_.push_back(k.value());
}

std::span<const double> Trace::state(std::size_t t) const {
  if (!has_states()) throw UnsupportedError("trace does not keep states");
  return row(states_, layout_.state_dim, t);
}
std::span<const double> Trace::g(std::size_t t) const {
  return row(g_, layout_.g_dim, t);
}
std::span<const double> Trace::f(std::size_t t) const {
  return row(f_, layout_.f_dim, t);
}
std::span<const double> Trace::cond_g(std::size_t t) const {
  return row(cond_g_, layout_.g_dim, t);
}
std::span<const double> Trace::cond_f(std::size_t t) const {
  return row(cond_f_, layout_.f_dim, t);
}
std::span<const double> Trace::first_cond_g(std::size_t t) const {
  if (!has_first_cond_g()) {
    throw UnsupportedError("trace has no Pi_1 g column");
  }
  return row(first_cond_g_, layout_.g_dim, t);
}

Trace run_chain(const SweepModel& model, const SweepSchedule& schedule,
                std::size_t steps, std::span<const double> init,
                RngPolicy policy, const ChainOptions& options) {
  if (steps == 0) throw ConfigError("run_chain: M must be >= 1");
  if (schedule.num_kernels != model.num_kernels()) {
    throw ConfigError("run_chain: schedule has K=" +
                      std::to_string(schedule.num_kernels) + " but " +
                      model.name() + " has K=" +
                      std::to_string(model.num_kernels()));
  }
  if (!model.has_conditional_expectations()) {
    throw ConfigError("run_chain: " + model.name() +
                      " has no conditional expectation for its integrand");
  }
  if (init.size() != model.state_dim()) {
    throw ConfigError("run_chain: initial state has wrong dimension");
  }
  model.check_state(init);

  TraceLayout layout;
  layout.schedule = schedule.kind;
  layout.num_kernels = model.num_kernels();
  layout.state_dim = model.state_dim();
  layout.g_dim = model.g_dim();
  layout.f_dim = model.f_dim();
  layout.gibbs_kernels = model.gibbs_kernels();
  layout.data_augmentation = model.data_augmentation();

  Trace trace(layout, policy);
  trace.reserve(steps);
  RandomStream rng(policy);
  std::vector<double> x(init.begin(), init.end());

  std::uint64_t burn = options.burn_in;
  if (schedule.kind == ScheduleKind::Deterministic && burn > 0) {
    const auto K = static_cast<std::uint64_t>(schedule.num_kernels);
    burn = (burn + K - 1) / K * K;
  }
  for (std::uint64_t t = 0; t < burn; ++t) {
    model.transition(kernel_at_step(schedule, t, rng), x, rng);
  }

  std::vector<double> g(layout.g_dim), f(layout.f_dim), cg(layout.g_dim),
      cf(layout.f_dim), first(layout.data_augmentation ? layout.g_dim : 0);
  const Observation obs{g, f, cg, cf};
  const std::span<const double> no_state;
  for (std::size_t t = 0; t < steps; ++t) {
    const KernelIndex k = kernel_at_step(schedule, t, rng);
    model.observe(k, x, obs);
    if (layout.data_augmentation) model.first_kernel_cond_g(x, first);
    trace.append(k, options.keep_states ? std::span<const double>(x) : no_state,
                 g, f, cg, cf, first);
    if (t + 1 < steps) model.transition(k, x, rng);
  }
  return trace;
}

std::vector<std::vector<double>> subchain(const Trace& trace, KernelIndex k) {
  const TraceLayout& layout = trace.layout();
  if (layout.schedule != ScheduleKind::Deterministic) {
    throw UnsupportedError("subchain requires a deterministic schedule");
  }
  check_kernel(k, layout.num_kernels);
  std::vector<std::vector<double>> out;
  const auto K = static_cast<std::size_t>(layout.num_kernels);
  for (std::size_t t = k.slot(); t < trace.size(); t += K) {
    const auto s = trace.state(t);
    out.emplace_back(s.begin(), s.end());
  }
  return out;
}

}  // namespace dsweep
