// Copyright 2026 The VILMA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vilma {

/// Work is cut into fixed chunks of `chunk` indices regardless of the thread
/// count, so per-chunk partial results reduce identically for any `threads`.
struct ChunkPlan {
    std::size_t size = 0;
    std::size_t chunk = 64;

    std::size_t count() const { return size == 0 ? 0 : (size + chunk - 1) / chunk; }
    std::size_t begin(std::size_t c) const { return c * chunk; }
    std::size_t end(std::size_t c) const { return std::min(size, (c + 1) * chunk); }
};

/// Calls fn(c) for every chunk c in [0, plan.count()) on up to `threads` workers.
template <class Fn>
void parallel_chunks(const ChunkPlan &plan, int threads, Fn &&fn) {
    const std::size_t chunks = plan.count();
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || chunks <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            fn(c);
        }
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, chunks); ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t c = w; c < chunks; c += workers) {
                try {
                    fn(c);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                    return;
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace vilma
