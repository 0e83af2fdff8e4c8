#include "morphcloud/parallel.hpp"

#include <cstdlib>
#include <thread>
#include <vector>

namespace morphcloud {

int thread_budget() {
    if (const char* env = std::getenv("MORPHCLOUD_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(size_t begin, size_t end, const std::function<void(size_t)>& fn) {
    if (end <= begin) return;
    size_t n = end - begin;
    size_t workers = static_cast<size_t>(thread_budget());
    if (workers > n) workers = n;
    if (workers <= 1) {
        for (size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    size_t chunk = (n + workers - 1) / workers;
    std::vector<std::exception_ptr> errors(workers);
    for (size_t w = 0; w < workers; ++w) {
        size_t lo = begin + w * chunk;
        size_t hi = lo + chunk < end ? lo + chunk : end;
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn, err = &errors[w]] {
            try {
                for (size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                *err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    // lowest worker index wins so a multi-failure run rethrows deterministically
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

} // namespace morphcloud
