#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace nilmult {

/// out[i] = fn(i) for i < count on up to `jobs` threads. Results keep index
/// order; the first exception thrown by any call is rethrown after all workers stop.
template <typename T>
std::vector<T> parallel_map(std::size_t count, int jobs, const std::function<T(std::size_t)>& fn)
{
    std::vector<T> out(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < count;) {
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next = count;
            }
        }
    };
    const auto n = static_cast<std::size_t>(std::max(1, jobs));
    if (n == 1 || count <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t t = 0; t < std::min(n, count); ++t)
            threads.emplace_back(worker);
        for (auto& t : threads)
            t.join();
    }
    if (error)
        std::rethrow_exception(error);
    return out;
}

} // namespace nilmult
