#ifndef FRACSHE_ENSEMBLE_HPP_
#define FRACSHE_ENSEMBLE_HPP_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fracshe {

/// Worker count: `requested` if positive, otherwise hardware concurrency.
int resolve_threads(int requested);

/// Runs fn(worker, member) for member = 0..members-1 on `threads` workers
/// and returns the results in member order. Each worker owns one object
/// built by make_worker (solver workspaces and the like). Results never
/// depend on the schedule as long as fn is a pure function of the member.
/// The first exception thrown by any member is rethrown after all workers
/// stop.
template <class Worker, class Result>
std::vector<Result> run_ensemble(
    std::size_t members, int threads,
    const std::function<Worker()> &make_worker,
    const std::function<Result(Worker &, std::size_t)> &fn) {
  std::vector<Result> out(members);
  const int n = std::max(1, std::min<int>(resolve_threads(threads),
                                          static_cast<int>(members)));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    try {
      Worker worker = make_worker();
      for (;;) {
        if (failed.load()) return;
        std::size_t m = next.fetch_add(1);
        if (m >= members) return;
        out[m] = fn(worker, m);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      failed = true;
    }
  };
  if (n == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(body);
    for (auto &t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace fracshe

#endif  // FRACSHE_ENSEMBLE_HPP_
