#pragma once

#include <cstddef>
#include <functional>

namespace mavar {

// Runs fn(i) for i in [0, count) across hardware threads. Each index must
// write only its own output slot; completion order is unspecified but the
// caller's result layout is index-addressed, so output is deterministic.
// Nested calls from inside a worker degrade to a serial loop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace mavar
