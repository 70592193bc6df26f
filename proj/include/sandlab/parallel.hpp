#pragma once

#include <functional>

namespace sandlab {

// Worker count: hardware concurrency, capped by SANDLAB_THREADS when set.
int thread_count();

// Calls body(i) for i in [0, count) on up to thread_count() workers.
// Bodies must only write to slots owned by their own index.
void for_each_replica(int count, const std::function<void(int)>& body);

}  // namespace sandlab
