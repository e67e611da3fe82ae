#include "mlcv/estimators/replicate.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "mlcv/error.hpp"

namespace mlcv {

std::size_t thread_count() {
  if (const char* env = std::getenv("MLCV_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t threads) {
  if (threads == 0) threads = thread_count();
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ReplicateSummary summarize_replicates(std::vector<double> values, double reference) {
  ReplicateSummary s;
  s.values = std::move(values);
  const double r = static_cast<double>(s.values.size());
  if (s.values.empty()) return s;
  double sum = 0.0, sq = 0.0;
  for (double v : s.values) {
    sum += v;
    sq += (v - reference) * (v - reference);
  }
  s.mean = sum / r;
  s.rmse = std::sqrt(sq / r);
  if (s.values.size() > 1) {
    double dev = 0.0;
    for (double v : s.values) dev += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(dev / (r - 1.0));
    s.std_error = s.sd / std::sqrt(r);
  }
  return s;
}

ReplicateSummary replicate_rmse(std::size_t replicates, double reference, const std::function<double(std::size_t)>& run,
                                std::size_t threads) {
  if (replicates < 2) throw Error("invalid_argument", "replicate_rmse: at least two replicates are required");
  std::vector<double> values(replicates);
  parallel_for(replicates, [&](std::size_t r) { values[r] = run(r); }, threads);
  return summarize_replicates(std::move(values), reference);
}

} // namespace mlcv
