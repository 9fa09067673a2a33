#pragma once

#include <cstddef>
#include <functional>

namespace jpec {

// Number of worker threads used by row-parallel kernels.
//
// Read once from JPEC_THREADS: "0" or "1" means sequential; unset means
// std::thread::hardware_concurrency(). Every parallel kernel partitions rows
// into disjoint contiguous ranges and computes each row exactly as the
// sequential loop would, so results are bitwise independent of this value.
std::size_t worker_count();

// Overrides the environment-derived value (0 restores it).
void set_worker_count(std::size_t workers);

// Runs body(begin, end) over [0, n) split into contiguous chunks. Falls back to
// a single inline call when work is below `min_work` or only one worker exists.
void parallel_rows(std::size_t n, std::size_t min_work, std::size_t work_per_row,
                   const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace jpec
