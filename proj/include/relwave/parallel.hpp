#pragma once

#include <cstddef>
#include <functional>

namespace relwave {

// Worker count used by parallel_for; 1 runs inline. Defaults to 1.
void set_thread_count(int threads);
int thread_count();

// Calls body(i) for i in [0, count). Iterations must write disjoint outputs.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace relwave
