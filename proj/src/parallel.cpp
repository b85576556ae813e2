#include "qboot/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qboot::detail {

unsigned resolve_threads(unsigned threads) {
  if (threads != 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void run_chunked(std::uint64_t total, unsigned n_chunks, unsigned threads,
                 const std::function<void(unsigned chunk, std::uint64_t begin,
                                          std::uint64_t end)>& fn) {
  if (total == 0 || n_chunks == 0) return;
  const auto begin_of = [total, n_chunks](unsigned c) {
    return total * c / n_chunks;  // total stays far below 2^64 / n_chunks
  };
  const unsigned workers =
      std::min(resolve_threads(threads), std::max(1u, n_chunks));
  if (workers <= 1) {
    for (unsigned c = 0; c < n_chunks; ++c) {
      const std::uint64_t b = begin_of(c), e = begin_of(c + 1);
      if (b < e) fn(c, b, e);
    }
    return;
  }

  std::atomic<unsigned> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const unsigned c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= n_chunks) return;
      const std::uint64_t b = begin_of(c), e = begin_of(c + 1);
      if (b >= e) continue;
      try {
        fn(c, b, e);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace qboot::detail
