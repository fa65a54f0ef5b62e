// Copyright 2026 The AuctionLab Authors
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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace auctionlab {

/// Worker cap: AUCTIONLAB_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. Each index is
/// visited exactly once; the first exception thrown by any task is rethrown
/// after all workers have joined.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Independent generator for stream `stream_id` of `master_seed`. The seed of
/// the stream is mix64(master_seed ^ mix64(stream_id + 0x9e3779b97f4a7c15)),
/// so streams can be consumed in any order or concurrently.
std::mt19937_64 stream_rng(std::uint64_t master_seed, std::uint64_t stream_id);

}  // namespace auctionlab
