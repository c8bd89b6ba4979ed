#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace sciprep {

/// Applies fn to 0..n-1 across `workers` threads; results land at their input
/// index, so output order is independent of scheduling. The first exception
/// (by index) is rethrown after all workers finish.
template <class Out, class Fn>
std::vector<Out> parallel_map(std::size_t n, int workers, Fn fn) {
    std::vector<Out> results(n);
    if (n == 0) return results;
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> threads;
    const std::size_t nw = std::min<std::size_t>(workers, n);
    for (std::size_t w = 0; w < nw; ++w) {
        threads.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    results[i] = fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    for (std::size_t i = 0; i < n; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
    return results;
}

} // namespace sciprep
