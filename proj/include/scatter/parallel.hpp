#ifndef SCATTER_PARALLEL_HPP
#define SCATTER_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace scatter {

// Worker count: SCATTER_THREADS if set (>= 1), else hardware concurrency.
std::size_t worker_count();

// Runs task(i) for i in [0, n). Tasks must write disjoint outputs; any
// reduction over task results is done by the caller in index order, so the
// outcome never depends on the number of workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &task);

} // namespace scatter

#endif // SCATTER_PARALLEL_HPP
