#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

namespace drc::cli {

/// Unbounded multi-producer queue; the consumer blocks in pop().
template <typename T>
class Channel {
 public:
  void push(T value) {
    {
      std::lock_guard lock(mu_);
      items_.push_back(std::move(value));
    }
    cv_.notify_one();
  }

  T pop() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !items_.empty(); });
    T value = std::move(items_.front());
    items_.pop_front();
    return value;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<T> items_;
};

/// Runs work(i) for i in [0, count) on up to `workers` threads. Results are
/// handed to consume(i, result) on the calling thread, in completion order.
/// `work` must not throw.
template <typename Work, typename Consume>
void parallel_for_each(std::size_t count, std::size_t workers, Work&& work,
                       Consume&& consume) {
  using Result = decltype(work(std::size_t{}));
  if (count == 0) return;
  workers = std::max<std::size_t>(1, std::min(workers, count));
  Channel<std::pair<std::size_t, Result>> results;
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        results.push({i, work(i)});
      }
    });
  }
  for (std::size_t done = 0; done < count; ++done) {
    auto [i, r] = results.pop();
    consume(i, std::move(r));
  }
}

}  // namespace drc::cli
