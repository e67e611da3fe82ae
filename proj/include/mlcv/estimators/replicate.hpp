#pragma once

#include <functional>
#include <vector>

namespace mlcv {

// Worker count: MLCV_THREADS if set, else the hardware concurrency.
std::size_t thread_count();

// Runs body(i) for i in [0, n) on a pool of workers; the first exception
// thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t threads = 0);

struct ReplicateSummary {
  std::vector<double> values;
  double mean = 0.0;
  double sd = 0.0;         // sample standard deviation of the replicates
  double std_error = 0.0;  // sd / √R
  double rmse = 0.0;       // against the reference
};

ReplicateSummary summarize_replicates(std::vector<double> values, double reference);

// Evaluates run(r) for r = 0..R−1 concurrently; values are stored by index
// so the summary does not depend on scheduling.
ReplicateSummary replicate_rmse(std::size_t replicates, double reference, const std::function<double(std::size_t)>& run,
                                std::size_t threads = 0);

} // namespace mlcv
