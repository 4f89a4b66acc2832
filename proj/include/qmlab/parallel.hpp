// Copyright 2026 The qmlab developers
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

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace qmlab {

// Trials are decomposed into fixed-size blocks and block partials are folded
// in block order, so the result of a parallel run is identical for every
// thread count. Each trial draws from its own (seed, trial_index) substream.
inline constexpr std::size_t kTrialBlock = 4096;

inline std::size_t block_count(std::size_t n_trials) {
  return (n_trials + kTrialBlock - 1) / kTrialBlock;
}

// Invokes fn(block_index, first_trial, last_trial) for every block. Block
// order across threads is arbitrary; callers must store per-block results
// and fold them in block order.
template <class BlockFn>
void for_each_block(std::size_t n_trials, int threads, BlockFn&& fn) {
  const std::size_t n_blocks = block_count(n_trials);
  if (n_blocks == 0) return;

  auto run_block = [&](std::size_t b) {
    const std::size_t first = b * kTrialBlock;
    const std::size_t last = std::min(first + kTrialBlock, n_trials);
    fn(b, first, last);
  };

  if (threads <= 1 || n_blocks == 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
    return;
  }

  std::atomic<std::size_t> next{0};
  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), n_blocks);
  std::vector<std::jthread> workers;
  workers.reserve(n_workers);
  for (std::size_t t = 0; t < n_workers; ++t) {
    workers.emplace_back([&] {
      for (std::size_t b = next.fetch_add(1); b < n_blocks;
           b = next.fetch_add(1)) {
        run_block(b);
      }
    });
  }
}

// Compensated (Kahan) accumulator for long scalar sums.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }

  double value() const { return sum; }
};

}  // namespace qmlab
