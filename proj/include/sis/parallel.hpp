#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace sis::detail {

/// Worker count for per-cell maps. Capped by SIS_INVARIANCE_THREADS when set.
inline int analysis_thread_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    n = std::min(n, 8);
    if (const char* env = std::getenv("SIS_INVARIANCE_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1) n = std::min(n, cap);
        } catch (...) {
            // unreadable value: keep the default
        }
    }
    return n;
}

/// Index-parallel map. Each index writes only its own output slot, so results
/// are identical to the serial loop regardless of the worker count.
template <typename Body>
void parallel_for(int count, Body&& body) {
    const int workers = std::min(analysis_thread_count(), std::max(count, 1));
    if (workers <= 1 || count < 2) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> threads;
    std::exception_ptr error;
    std::mutex error_mutex;
    const int chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int lo = w * chunk;
        const int hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([&, lo, hi] {
            try {
                for (int i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace sis::detail
