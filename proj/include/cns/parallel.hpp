#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace cns {

/// Thread cap: CNS_THREADS when set, hardware concurrency otherwise.
inline int thread_cap() {
    static const int cap = [] {
        if (const char* env = std::getenv("CNS_THREADS")) {
            const int v = std::atoi(env);
            if (v >= 1) return v;
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : static_cast<int>(hw);
    }();
    return cap;
}

/// Runs fn(i) for i in [0, count) over at most thread_cap() threads. Each
/// index is handled exactly once with disjoint outputs, so the result does
/// not depend on the schedule.
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
    const int workers = std::min(count, thread_cap());
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace cns
