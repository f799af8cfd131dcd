// Copyright 2026 The qgnn-tracking Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstddef>
#include <functional>

namespace qgnn {

/// Worker count used by parallel_for; 0 means hardware concurrency.
void set_thread_count(std::size_t n);
std::size_t thread_count();

/**
 * Split [0, n) into contiguous chunks and run `fn(begin, end)` on each.
 * Chunk boundaries depend only on n and the thread count, and every index
 * writes its own output slot, so results do not depend on scheduling.
 */
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)> &fn,
                  std::size_t min_chunk = 16);

} // namespace qgnn
