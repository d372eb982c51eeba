#include "stkde/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stkde {

void parallel_for(Index n, int workers, const std::function<void(Index, Index)>& fn) {
  if (n <= 0) {
    return;
  }
  const Index chunks = std::min<Index>(std::max(workers, 1), n);
  if (chunks == 1) {
    fn(0, n);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(chunks));

  for (Index c = 0; c < chunks; ++c) {
    const Index begin = n * c / chunks;
    const Index end = n * (c + 1) / chunks;
    threads.emplace_back([&, begin, end]() {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) {
          first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) {
    t.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
}

}  // namespace stkde
