#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gridswitch {

/// Effective worker count: 0 means hardware concurrency, never above `tasks`.
[[nodiscard]] inline unsigned resolve_workers(unsigned requested, std::size_t tasks) {
    unsigned w = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (tasks < w) w = static_cast<unsigned>(std::max<std::size_t>(1, tasks));
    return w;
}

/// Runs body(state, i) for i in [0, count). Each worker builds its own state
/// with make_state(); results must be written to slot i by the body, so the
/// output is independent of scheduling. The first exception is rethrown.
template <class MakeState, class Body>
void parallel_for(std::size_t count, unsigned workers, MakeState make_state, Body body) {
    workers = resolve_workers(workers, count);
    if (count == 0) return;
    if (workers == 1) {
        auto state = make_state();
        for (std::size_t i = 0; i < count; ++i) body(state, i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        try {
            auto state = make_state();
            for (std::size_t i = next++; i < count; i = next++) body(state, i);
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = count;
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace gridswitch
