#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

#include "hardylab/util.hpp"

namespace hardylab {

// Number of worker threads used by block reductions. 0 = hardware.
void set_parallelism(int jobs);
int parallelism();

// Deterministic parallel reduction: [0,n) is cut into fixed-size blocks,
// each block is summed sequentially (Kahan), and block results are combined
// in block order. The partition does not depend on the thread count, so the
// result is bit-identical for any parallelism degree.
//
// body(i, acc) must add item i's contribution into acc.
double block_reduce(size_t n, size_t block_size,
                    const std::function<void(size_t, Kahan&)>& body);

// Parallel loop over independent chunks with deterministic output slots:
// fn(chunk_index) is run once per chunk on some thread.
void parallel_chunks(size_t n_chunks, const std::function<void(size_t)>& fn);

}  // namespace hardylab
