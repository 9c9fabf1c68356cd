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

#pragma once

#include <array>
#include <cstdint>

namespace dsweep {

// Philox4x32-10 block function (Salmon et al., SC'11). Pure function of
// (counter, key); the stream classes below only manage the counter.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

// SplitMix64 finalizer; used to derive Philox keys from seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Identifies one reproducible random stream. Replications use
// stream_id = replication index under a shared master seed.
struct RngPolicy {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

// Counter-based stream. The Philox key is mix(master_seed, stream_id); the
// stream id is also placed in the upper counter words so that two policies
// can only collide if both key and stream id collide. The lower 64 counter
// bits count blocks of four 32-bit outputs.
//
// Only integer arithmetic, sqrt and log are used to produce variates, so a
// given RngPolicy yields the same sequence on any IEEE-754 platform with a
// correctly rounded sqrt and the same libm log.
class RandomStream {
 public:
  explicit RandomStream(RngPolicy policy);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();

  // Standard normal via the Marsaglia polar method.
  double normal();

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n);

  RngPolicy policy() const { return policy_; }

 private:
  void refill();

  RngPolicy policy_;
  PhiloxKey key_{};
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace dsweep
