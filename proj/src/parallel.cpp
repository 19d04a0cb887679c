#include "tqs/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace tqs {

int worker_count() {
    if (const char* env = std::getenv("TQS_THREADS")) {
        const int k = std::atoi(env);
        if (k >= 1)
            return k;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? int(hw) : 1;
}

void parallel_for(size_t count, const std::function<void(size_t)>& fn) {
    const int workers = std::min<size_t>(size_t(worker_count()), count);
    if (workers <= 1) {
        for (size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto body = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= count || failed.load())
                return;
            try {
                fn(i);
            } catch (...) {
                if (!failed.exchange(true))
                    error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(size_t(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back(body);
    for (auto& th : pool)
        th.join();
    if (failed.load())
        std::rethrow_exception(error);
}

} // namespace tqs
