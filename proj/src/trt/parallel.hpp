#pragma once
// Chunked worker parallelism with results merged by index. The worker count
// is capped by the TRT_THREADS environment variable.

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace trt {

inline int worker_count(int tasks) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("TRT_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) hw = std::min(hw, cap);
    }
    return std::max(1, std::min(hw, tasks));
}

// Runs f(i) for i in [0, n). Each index is processed exactly once; any
// exception is rethrown on the calling thread.
template <class F>
void parallel_for(int n, F&& f) {
    if (n <= 0) return;
    const int workers = worker_count(n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> threads;
    std::exception_ptr err;
    std::mutex err_mutex;
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&, w]() {
            try {
                for (int i = w; i < n; i += workers) f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace trt
