#ifndef MUSCERT_PARALLEL_H_
#define MUSCERT_PARALLEL_H_

#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace muscert {

// Default worker count: MUSCERT_WORKERS from the environment, else 1.
size_t default_workers();

// Evaluates fn(0..count-1) on up to `workers` threads and returns the results
// in index order, so output never depends on the worker count. If any call
// throws, the exception from the lowest failing index is rethrown.
template <class Fn>
auto parallel_map(size_t count, size_t workers, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, size_t>> {
  using Result = std::invoke_result_t<Fn&, size_t>;
  std::vector<std::optional<Result>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const size_t threads = workers < 1 ? 1 : (workers < count ? workers : count);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace muscert

#endif  // MUSCERT_PARALLEL_H_
