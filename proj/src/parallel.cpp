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
#include "qgnn/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace qgnn {
namespace {
std::atomic<std::size_t> g_threads{0};
}

void set_thread_count(std::size_t n) { g_threads.store(n); }

std::size_t thread_count() {
    const std::size_t n = g_threads.load();
    if (n != 0) {
        return n;
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)> &fn,
                  std::size_t min_chunk) {
    if (n == 0) {
        return;
    }
    const std::size_t workers =
        std::min(thread_count(), (n + min_chunk - 1) / std::max<std::size_t>(min_chunk, 1));
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) {
                break;
            }
            pool.emplace_back([&fn, &errors, w, begin, end] {
                try {
                    fn(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        try {
            fn(0, std::min(n, chunk));
        } catch (...) {
            errors[0] = std::current_exception();
        }
    }
    for (auto &err : errors) {
        if (err) {
            std::rethrow_exception(err);
        }
    }
}

} // namespace qgnn
