#include "sphsp/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace sphsp {

namespace {
std::atomic<int> g_threads{0};
constexpr std::size_t kMinItemsPerThread = 4096;
}  // namespace

void set_thread_count(int threads) { g_threads.store(std::max(0, threads)); }

int thread_count() {
    const int configured = g_threads.load();
    if (configured > 0) {
        return configured;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) {
        return;
    }
    const std::size_t by_size = std::max<std::size_t>(1, n / kMinItemsPerThread);
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(thread_count()), by_size);
    if (workers <= 1) {
        body(0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin < end) {
            pool.emplace_back([&body, begin, end] { body(begin, end); });
        }
    }
    body(0, std::min(n, chunk));
}

}  // namespace sphsp
