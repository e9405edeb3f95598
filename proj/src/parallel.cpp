#include "relwave/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

#include "relwave/errors.hpp"

namespace relwave {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int threads) {
    if (threads < 1) throw InvalidArgument("thread count must be >= 1");
    g_threads = threads;
}

int thread_count() { return g_threads; }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const auto workers = static_cast<std::size_t>(std::min<std::size_t>(g_threads, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] {
            for (std::size_t i = begin; i < end; ++i) body(i);
        });
    }
}

}  // namespace relwave
