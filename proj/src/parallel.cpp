#include "qplab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qplab {

namespace {
std::atomic<int> g_threads{1};
}

void set_threads(int n) { g_threads = std::max(1, n); }

int threads() { return g_threads; }

void parallel_for(long long n, const std::function<void(long long)>& body) {
  int w = static_cast<int>(std::min<long long>(g_threads, n));
  if (w <= 1) {
    for (long long i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (long long i = t; i < n; i += w) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace qplab
