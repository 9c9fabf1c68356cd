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

// Sweep schedules, the model interface, and chain traces.
//
// Kernels are numbered 1..K. Under a deterministic sweep the kernel that
// produces X_{t+1} from X_t is sigma^t(1) = (t mod K) + 1, so kernel 1 fires
// first.

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dsweep/rng.hpp"

namespace dsweep {

class KernelIndex {
 public:
  constexpr explicit KernelIndex(int k) : k_(k) {}
  constexpr int value() const { return k_; }
  // Zero-based position, for indexing per-kernel arrays.
  constexpr std::size_t slot() const { return static_cast<std::size_t>(k_ - 1); }
  friend constexpr auto operator<=>(KernelIndex, KernelIndex) = default;

 private:
  int k_;
};

// Cyclic successor: k+1 for k < K, 1 for k = K. Throws ConfigError when k is
// outside 1..K.
KernelIndex sigma(KernelIndex k, int num_kernels);

// sigma applied t times.
KernelIndex sigma_power(KernelIndex k, std::uint64_t t, int num_kernels);

enum class ScheduleKind { Deterministic, Random };

struct SweepSchedule {
  ScheduleKind kind = ScheduleKind::Deterministic;
  int num_kernels = 1;
};

// Deterministic: (t mod K) + 1, rng untouched. Random: uniform over 1..K.
KernelIndex kernel_at_step(const SweepSchedule& schedule, std::uint64_t t,
                           RandomStream& rng);

// Per-step output of a model: g(x), f(x), and the conditional expectations
// of both under the kernel about to fire.
struct Observation {
  std::span<double> g;
  std::span<double> f;
  std::span<double> cond_g;
  std::span<double> cond_f;
};

// A family of K pi-stationary kernels with closed-form conditional
// expectations of an integrand g (dimension d) and a control variate basis f
// (dimension p). States are flat vectors of doubles. Implementations are
// immutable; all randomness comes from the caller's stream.
class SweepModel {
 public:
  virtual ~SweepModel() = default;

  virtual std::string name() const = 0;
  virtual int num_kernels() const = 0;
  virtual std::size_t state_dim() const = 0;
  virtual std::size_t g_dim() const = 0;
  virtual std::size_t f_dim() const = 0;

  // Every kernel is a Gibbs kernel (idempotent, pi-reversible).
  virtual bool gibbs_kernels() const = 0;
  // K = 2 and Pi_2 g = g.
  virtual bool data_augmentation() const { return false; }
  virtual bool has_conditional_expectations() const { return true; }

  // Throws ConfigError if x is not in the state space.
  virtual void check_state(std::span<const double> x) const = 0;
  virtual void transition(KernelIndex k, std::span<double> x,
                          RandomStream& rng) const = 0;
  virtual void observe(KernelIndex k, std::span<const double> x,
                       const Observation& out) const = 0;
  // Pi_1 g(x). Only called when data_augmentation() is true.
  virtual void first_kernel_cond_g(std::span<const double> x,
                                   std::span<double> out) const;

  // A draw from pi when one is available exactly, otherwise a fixed or
  // uniformly random state.
  virtual std::vector<double> initial_state(RandomStream& rng) const = 0;
};

struct TraceLayout {
  ScheduleKind schedule = ScheduleKind::Deterministic;
  int num_kernels = 1;
  std::size_t state_dim = 0;
  std::size_t g_dim = 1;
  std::size_t f_dim = 1;
  bool gibbs_kernels = false;
  bool data_augmentation = false;
};

// Realized chain X_0..X_{M-1}. kernel_at(t) is the kernel producing X_{t+1}
// from X_t; cond_g(t), cond_f(t) are Pi_{kernel_at(t)} g, f at X_t. When the
// layout declares data augmentation, first_cond_g(t) holds Pi_1 g(X_t) at
// every t. States are optional (long raster runs do not keep them).
class Trace {
 public:
  explicit Trace(TraceLayout layout, RngPolicy policy = {});

  void reserve(std::size_t steps);
  void append(KernelIndex k, std::span<const double> state,
              std::span<const double> g, std::span<const double> f,
              std::span<const double> cond_g, std::span<const double> cond_f,
              std::span<const double> first_cond_g = {});

  const TraceLayout& layout() const { return layout_; }
  RngPolicy policy() const { return policy_; }
  std::size_t size() const { return kernel_at_.size(); }
  bool has_states() const { return !states_.empty(); }
  bool has_first_cond_g() const { return !first_cond_g_.empty(); }

  KernelIndex kernel_at(std::size_t t) const { return KernelIndex(kernel_at_[t]); }
  std::span<const double> state(std::size_t t) const;
  std::span<const double> g(std::size_t t) const;
  std::span<const double> f(std::size_t t) const;
  std::span<const double> cond_g(std::size_t t) const;
  std::span<const double> cond_f(std::size_t t) const;
  std::span<const double> first_cond_g(std::size_t t) const;

 private:
  TraceLayout layout_;
  RngPolicy policy_;
  std::vector<int> kernel_at_;
  std::vector<double> states_;
  std::vector<double> g_, f_, cond_g_, cond_f_, first_cond_g_;
};

struct ChainOptions {
  bool keep_states = true;
  // Transitions discarded before X_0 is recorded. Rounded up to whole sweeps
  // under a deterministic schedule so that kernel 1 still fires at t = 0.
  std::uint64_t burn_in = 0;
};

// Runs M steps from init. Throws ConfigError on M = 0, a schedule whose K
// differs from the model's, an invalid init, or a model without closed-form
// conditional expectations.
Trace run_chain(const SweepModel& model, const SweepSchedule& schedule,
                std::size_t steps, std::span<const double> init,
                RngPolicy policy, const ChainOptions& options = {});

// States visited just before kernel k fires: X_{k-1}, X_{k-1+K}, ...
// Deterministic traces with stored states only.
std::vector<std::vector<double>> subchain(const Trace& trace, KernelIndex k);

}  // namespace dsweep
