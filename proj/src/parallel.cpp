#include "stbiholo/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace stbiholo {

int worker_count() {
    if (const char* env = std::getenv("STBI_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    const int workers = std::min(worker_count(), n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (int i = t; i < n; i += workers) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace stbiholo
