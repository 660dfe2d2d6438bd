// SPDX-License-Identifier: Apache-2.0
//
// liscap: uplink capacity analysis for large intelligent surfaces
// Copyright (C) 2026 liscap developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef LIS_PARALLEL_HPP
#define LIS_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace lis
{

namespace detail
{
inline std::atomic<unsigned> &thread_cap_storage()
{
    static std::atomic<unsigned> cap{0}; // 0 = not set yet
    return cap;
}
} // namespace detail

/// Worker count for parallel loops. Resolution order: explicit
/// set_thread_cap() call (the CLI maps --threads here), then the
/// LIS_THREADS environment variable, then hardware_concurrency().
inline unsigned thread_cap()
{
    unsigned cap = detail::thread_cap_storage().load(std::memory_order_relaxed);
    if (cap > 0)
        return cap;
    if (const char *env = std::getenv("LIS_THREADS"))
    {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1)
            return unsigned(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

inline void set_thread_cap(unsigned n) { detail::thread_cap_storage().store(n, std::memory_order_relaxed); }

/// Runs body(i) for i in [0, n) on up to thread_cap() threads, contiguous
/// index blocks per worker. Callers keep determinism by writing only to
/// per-index slots. Exceptions from workers are rethrown on the caller.
template <class F>
void parallel_for(std::size_t n, F &&body)
{
    if (n == 0)
        return;
    std::size_t workers = std::min<std::size_t>(thread_cap(), n);
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }

    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w)
    {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&, w, lo, hi]() {
            try
            {
                for (std::size_t i = lo; i < hi; ++i)
                    body(i);
            }
            catch (...)
            {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto &t : pool)
        t.join();
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace lis

#endif
