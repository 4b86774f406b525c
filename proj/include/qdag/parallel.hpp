#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qdag {

/// Worker count to use when the caller passes 0.
inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// out[i] = fn(in[i]), computed on up to `workers` threads. Output order is
/// the input order regardless of scheduling. The first exception thrown by
/// any task is rethrown after all workers stop.
template <class In, class Fn>
auto parallel_map(const std::vector<In>& in, unsigned workers, Fn fn)
    -> std::vector<decltype(fn(in.front()))> {
  using Out = decltype(fn(in.front()));
  std::vector<Out> out(in.size());
  if (workers == 0) workers = default_workers();
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(in.size(), 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = fn(in[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    for (std::size_t i; !stop && (i = next++) < in.size();) {
      try {
        out[i] = fn(in[i]);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        stop = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace qdag
