#pragma once

#include <cstddef>
#include <functional>

namespace kerrwig {

// Worker count used by grid kernels. 0 selects hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for i in [begin, end) on the configured worker pool. Work is
// split into contiguous blocks; body must only write to slots owned by i, so
// results never depend on the number of workers.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

}  // namespace kerrwig
